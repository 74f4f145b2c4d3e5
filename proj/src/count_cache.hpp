#pragma once

#include <cstdint>
#include <string>

#include "symplectic.hpp"

namespace wl {

// Optional on-disk cache of count tables. Layout (little-endian):
// "WSLC", u32 version, u32 kind length, kind bytes, i32 g, i64 mult, i64 l,
// i32 k, u64 entries, then per entry: u32 key length, i64 key[], u32 digit
// count, decimal digits of the count. Entries are sorted by key.
constexpr uint32_t kCacheVersion = 1;

struct CacheKey {
  std::string kind;  // "trace" or "charpoly"
  int g = 1;
  int64_t mult = 0;  // multiplier residue the table depends on
  int64_t l = 0;
  int k = 1;
};

// Directory from set_cache_dir or WEILLAB_CACHE_DIR; empty disables the cache.
void set_cache_dir(const std::string& dir);
std::string cache_dir();

std::string cache_path(const CacheKey& key);
bool cache_load(const CacheKey& key, CountTable& out);
void cache_store(const CacheKey& key, const CountTable& table);

// Serialization without the file system, used by tests.
std::string encode_table(const CacheKey& key, const CountTable& table);
bool decode_table(const std::string& bytes, const CacheKey& key, CountTable& out);

}  // namespace wl
