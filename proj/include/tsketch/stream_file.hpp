#pragma once

// Text stream files: one `<k> <c>` update per line, `#` comments and blank
// lines ignored. k is decimal in [1, m), c signed decimal in [-r, r].

#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "tsketch/types.hpp"

namespace tsketch {

struct StreamLimits {
  u64 universe = u64{1} << 32;
  u64 max_count = u64{1} << 31;
};

/// Calls `sink` for every update in order. Throws InputError naming the
/// source and line on malformed or out-of-range input.
void read_stream(std::istream& in, const StreamLimits& limits, const std::function<void(const Update&)>& sink,
                 const std::string& source = "<stream>");
std::vector<Update> parse_stream(std::istream& in, const StreamLimits& limits, const std::string& source = "<stream>");
std::vector<Update> parse_stream_file(const std::filesystem::path& path, const StreamLimits& limits);

} // namespace tsketch
