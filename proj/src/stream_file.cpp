#include "tsketch/stream_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>

#include "tsketch/errors.hpp"

namespace tsketch {

namespace {

constexpr std::string_view kSpace = " \t\r\v\f";

std::string_view next_token(std::string_view& rest) {
  const auto start = rest.find_first_not_of(kSpace);
  if (start == std::string_view::npos) {
    rest = {};
    return {};
  }
  rest.remove_prefix(start);
  const auto end = std::min(rest.find_first_of(kSpace), rest.size());
  const auto token = rest.substr(0, end);
  rest.remove_prefix(end);
  return token;
}

template <class T>
bool parse_number(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

} // namespace

void read_stream(std::istream& in, const StreamLimits& limits, const std::function<void(const Update&)>& sink,
                 const std::string& source) {
  std::string line;
  std::size_t number = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(source + ":" + std::to_string(number) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++number;
    std::string_view rest = line;
    const auto first = next_token(rest);
    if (first.empty() || first.front() == '#') continue;
    const auto second = next_token(rest);
    if (second.empty()) fail("expected `<value> <count>`");
    if (!next_token(rest).empty()) fail("trailing text after `<value> <count>`");

    Update u;
    if (!parse_number(first, u.value)) fail("value '" + std::string(first) + "' is not an unsigned integer");
    if (!parse_number(second, u.count)) fail("count '" + std::string(second) + "' is not a signed 64-bit integer");
    if (u.value == 0 || u.value >= limits.universe) {
      fail("value " + std::to_string(u.value) + " outside [1, " + std::to_string(limits.universe) + ")");
    }
    const u64 mag = u.count < 0 ? u64{0} - static_cast<u64>(u.count) : static_cast<u64>(u.count);
    if (mag > limits.max_count) fail("count " + std::to_string(u.count) + " exceeds r = " + std::to_string(limits.max_count));
    sink(u);
  }
  if (in.bad()) throw InputError(source + ": read error");
}

std::vector<Update> parse_stream(std::istream& in, const StreamLimits& limits, const std::string& source) {
  std::vector<Update> out;
  read_stream(in, limits, [&](const Update& u) { out.push_back(u); }, source);
  return out;
}

std::vector<Update> parse_stream_file(const std::filesystem::path& path, const StreamLimits& limits) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_stream(in, limits, path.string());
}

} // namespace tsketch
