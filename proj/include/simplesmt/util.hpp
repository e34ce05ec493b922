#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace simplesmt {

namespace fs = std::filesystem;

// Reads a UTF-8 text file as lines (without terminators; a trailing "\r" is
// dropped). Throws EncodingError naming the first bad line.
std::vector<std::string> read_lines(const fs::path& path);

// Writes `content` to `path`, creating parent directories.
void write_file(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

bool valid_utf8(std::string_view s);

// Decodes one code point starting at s[pos] and advances pos. Assumes valid
// UTF-8; stray bytes are returned as themselves.
char32_t next_code_point(std::string_view s, std::size_t& pos);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

std::string ascii_lower(std::string_view s);

// Shortest decimal text that reads back to exactly the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Work is handed out in index order; callers write results into
// per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Combines hashes of a token-id sequence (boost::hash_combine style).
struct IdSequenceHash {
  std::size_t operator()(const std::vector<std::uint32_t>& ids) const noexcept {
    std::size_t seed = ids.size();
    for (auto id : ids) seed ^= id + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

}  // namespace simplesmt
