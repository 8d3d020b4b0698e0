#include "tsketch/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "tsketch/errors.hpp"

namespace tsketch {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'K', '1'};

class Writer {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <class U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<u64>(v)); }
  void i128v(i128 v) { uint(static_cast<u128>(v)); }

  std::vector<std::uint8_t> take() { return std::move(out_); }
  const std::vector<std::uint8_t>& data() const noexcept { return out_; }

private:
  std::vector<std::uint8_t> out_;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <class U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<u64>()); }
  i128 i128v() { return static_cast<i128>(uint<u128>()); }
  void expect_end() const {
    if (pos_ != in_.size()) throw FormatError("trailing bytes after sketch container");
  }

private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("truncated sketch container");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_cell(Writer& w, const StrictBinSketch& c) {
  w.i128v(c.x);
  w.i128v(c.y);
  w.i128v(c.z);
  w.i128v(c.w);
}

void write_cell(Writer& w, const NonStrictBinSketch& c) {
  w.i128v(c.x);
  w.i128v(c.y);
  w.i128v(c.z);
  w.i128v(c.w);
  w.i128v(c.t);
}

void read_cell(Reader& r, StrictBinSketch& c) {
  c.x = r.i128v();
  c.y = r.i128v();
  c.z = r.i128v();
  c.w = r.i128v();
}

void read_cell(Reader& r, NonStrictBinSketch& c) {
  c.x = r.i128v();
  c.y = r.i128v();
  c.z = r.i128v();
  c.w = r.i128v();
  c.t = r.i128v();
}

template <class Cell>
std::size_t nonzero_cells(std::span<const Cell> cells) {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.is_zero() ? 0 : 1;
  return n;
}

template <class Cell>
void write_cells(Writer& w, std::span<const Cell> cells) {
  w.uint(static_cast<std::uint32_t>(nonzero_cells(cells)));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].is_zero()) continue;
    w.uint(static_cast<std::uint32_t>(i));
    write_cell(w, cells[i]);
  }
}

template <class Cell>
void read_cells(Reader& r, std::span<Cell> cells, bool allow_empty = false) {
  const auto n = r.uint<std::uint32_t>();
  if ((n == 0 && !allow_empty) || n > cells.size()) throw FormatError("bad cell count");
  std::optional<std::uint32_t> prev;
  for (std::uint32_t j = 0; j < n; ++j) {
    const auto i = r.uint<std::uint32_t>();
    if (i >= cells.size() || (prev && i <= *prev)) throw FormatError("cell index out of order or range");
    prev = i;
    read_cell(r, cells[i]);
    if (cells[i].is_zero()) throw FormatError("zero cell stored explicitly");
  }
}

void write_config(Writer& w, const SamplerConfig& c) {
  w.uint(static_cast<u64>(c.model));
  w.uint(static_cast<u64>(c.recovery));
  w.uint(c.sample_size);
  w.f64(c.delta);
  w.f64(c.epsilon);
  w.uint(c.universe);
  w.uint(c.max_count);
  w.uint(c.max_length);
  w.f64(c.lambda);
  w.f64(c.alpha);
  w.uint(c.level_range);
  w.uint(c.seed);
  w.uint(static_cast<u64>(c.l0_kind));
}

SamplerConfig read_config(Reader& r) {
  SamplerConfig c;
  const u64 model = r.uint<u64>();
  const u64 recovery = r.uint<u64>();
  if (model > 1 || recovery > 1) throw FormatError("unknown stream model or recovery kind");
  c.model = static_cast<StreamModel>(model);
  c.recovery = static_cast<RecoveryKind>(recovery);
  c.sample_size = r.uint<u64>();
  c.delta = r.f64();
  c.epsilon = r.f64();
  c.universe = r.uint<u64>();
  c.max_count = r.uint<u64>();
  c.max_length = r.uint<u64>();
  c.lambda = r.f64();
  c.alpha = r.f64();
  c.level_range = r.uint<u64>();
  c.seed = r.uint<u64>();
  const u64 l0 = r.uint<u64>();
  if (l0 > 1) throw FormatError("unknown L0 estimator kind");
  c.l0_kind = static_cast<L0Kind>(l0);
  return c;
}

std::vector<u64> derived_fields(const DerivedParams& p) {
  return {p.capacity,        p.levels,           p.level_independence, p.l0_instances,
          p.frs.arrays,      p.frs.array_size,   p.frs.candidate_arrays, p.efrs.array_size,
          p.efrs.independence, p.efrs.guard_range};
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

} // namespace

std::vector<std::uint8_t> serialize(const SamplerSketch& input) {
  std::optional<SamplerSketch> flushed;
  const SamplerSketch* s = &input;
  if (input.pending() != 0) {
    flushed.emplace(input);
    flushed->flush();
    s = &*flushed;
  }

  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.uint(kContainerVersion);
  write_config(w, s->config());
  for (u64 v : derived_fields(s->params())) w.uint(v);
  w.uint(s->length());

  w.uint(static_cast<u64>(s->level_count()));
  for (std::size_t l = 0; l < s->level_count(); ++l) {
    if (const Frs* f = s->frs_level(l); f && !f->is_zero()) {
      w.uint(std::uint8_t{1});
      write_cells<StrictBinSketch>(w, f->cells());
    } else if (const Efrs* e = s->efrs_level(l); e && !e->is_zero()) {
      w.uint(std::uint8_t{1});
      if (e->layout().non_strict()) {
        write_cells<NonStrictBinSketch>(w, e->nonstrict_cells());
      } else {
        write_cells<StrictBinSketch>(w, e->strict_cells());
      }
    } else {
      w.uint(std::uint8_t{0});
    }
  }

  if (const auto* amp = s->l0().amplified()) {
    w.uint(static_cast<std::uint8_t>(L0Kind::Amplified));
    write_cells<NonStrictBinSketch>(w, amp->cells());
  } else {
    const auto& totals = s->l0().exact()->totals();
    w.uint(static_cast<std::uint8_t>(L0Kind::Exact));
    w.uint(static_cast<u64>(totals.size()));
    for (const auto& [k, c] : totals) {
      w.uint(k);
      w.i128v(c);
    }
  }

  w.uint(crc_of(w.data()));
  return w.take();
}

SamplerSketch deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 2 + 4) throw FormatError("sketch container too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("not a sketch container (bad magic)");
  const auto body = bytes.first(bytes.size() - 4);
  Reader trailer(bytes.last(4));
  if (trailer.uint<std::uint32_t>() != crc_of(body)) throw FormatError("sketch container CRC mismatch");

  Reader r(body.subspan(sizeof kMagic));
  const auto version = r.uint<std::uint16_t>();
  if (version != kContainerVersion) throw FormatError("unsupported container version " + std::to_string(version));
  const SamplerConfig config = read_config(r);

  std::optional<SamplerSketch> made;
  try {
    made.emplace(config);
  } catch (const Error& e) {
    throw FormatError(std::string("stored configuration rejected: ") + e.what());
  }
  SamplerSketch& s = *made;
  for (u64 v : derived_fields(s.params())) {
    if (r.uint<u64>() != v) throw FormatError("stored derived parameters disagree with the configuration");
  }
  const u64 length = r.uint<u64>();
  if (length > config.max_length) throw FormatError("stored stream length exceeds N_max");
  s.set_length(length);

  if (r.uint<u64>() != s.level_count()) throw FormatError("level count mismatch");
  for (std::size_t l = 0; l < s.level_count(); ++l) {
    const auto present = r.uint<std::uint8_t>();
    if (present > 1) throw FormatError("bad level presence flag");
    if (present == 0) continue;
    if (config.recovery == RecoveryKind::Frs) {
      read_cells<StrictBinSketch>(r, s.frs_level_mut(l).cells());
    } else if (config.model == StreamModel::NonStrict) {
      read_cells<NonStrictBinSketch>(r, s.efrs_level_mut(l).nonstrict_cells());
    } else {
      read_cells<StrictBinSketch>(r, s.efrs_level_mut(l).strict_cells());
    }
  }

  const auto kind = r.uint<std::uint8_t>();
  if (kind != static_cast<std::uint8_t>(config.l0_kind)) throw FormatError("L0 block kind mismatch");
  if (auto* amp = s.l0().amplified()) {
    read_cells<NonStrictBinSketch>(r, amp->cells(), true);
  } else {
    auto* exact = s.l0().exact();
    const u64 n = r.uint<u64>();
    std::optional<u64> prev;
    for (u64 i = 0; i < n; ++i) {
      const u64 k = r.uint<u64>();
      const i128 c = r.i128v();
      if (c == 0 || (prev && k <= *prev)) throw FormatError("bad exact L0 entry");
      prev = k;
      exact->set_total(k, c);
    }
  }
  r.expect_end();
  return std::move(*made);
}

void save(const SamplerSketch& sketch, const std::filesystem::path& path) {
  const auto bytes = serialize(sketch);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

SamplerSketch load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize(bytes);
}

} // namespace tsketch
