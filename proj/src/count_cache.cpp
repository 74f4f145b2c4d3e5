#include "count_cache.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

namespace wl {

namespace {

std::mutex g_mtx;
bool g_dir_set = false;
std::string g_dir;

template <class T>
void put(std::string& out, T v) {
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <class T>
bool get(const std::string& in, size_t& pos, T& v) {
  using U = std::make_unsigned_t<T>;
  if (pos + sizeof(T) > in.size()) return false;
  U u = 0;
  for (size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  v = static_cast<T>(u);
  return true;
}

}  // namespace

void set_cache_dir(const std::string& dir) {
  std::lock_guard<std::mutex> lk(g_mtx);
  g_dir = dir;
  g_dir_set = true;
}

std::string cache_dir() {
  std::lock_guard<std::mutex> lk(g_mtx);
  if (g_dir_set) return g_dir;
  const char* e = std::getenv("WEILLAB_CACHE_DIR");
  return e ? std::string(e) : std::string();
}

std::string cache_path(const CacheKey& key) {
  std::ostringstream os;
  os << cache_dir() << "/" << key.kind << "_g" << key.g << "_m" << key.mult << "_l" << key.l << "_k" << key.k
     << ".wslc";
  return os.str();
}

std::string encode_table(const CacheKey& key, const CountTable& table) {
  std::string out = "WSLC";
  put<uint32_t>(out, kCacheVersion);
  put<uint32_t>(out, static_cast<uint32_t>(key.kind.size()));
  out += key.kind;
  put<int32_t>(out, key.g);
  put<int64_t>(out, key.mult);
  put<int64_t>(out, key.l);
  put<int32_t>(out, key.k);
  put<uint64_t>(out, table.counts.size());
  for (const auto& [k, c] : table.counts) {  // std::map keeps keys sorted
    put<uint32_t>(out, static_cast<uint32_t>(k.size()));
    for (auto x : k) put<int64_t>(out, x);
    std::string digits = c.str();
    put<uint32_t>(out, static_cast<uint32_t>(digits.size()));
    out += digits;
  }
  return out;
}

bool decode_table(const std::string& in, const CacheKey& key, CountTable& out) {
  if (in.size() < 4 || in.compare(0, 4, "WSLC") != 0) return false;
  size_t pos = 4;
  uint32_t version = 0, klen = 0;
  if (!get(in, pos, version) || version != kCacheVersion) return false;
  if (!get(in, pos, klen) || pos + klen > in.size()) return false;
  std::string kind = in.substr(pos, klen);
  pos += klen;
  int32_t g = 0, k = 0;
  int64_t mult = 0, l = 0;
  uint64_t n = 0;
  if (!get(in, pos, g) || !get(in, pos, mult) || !get(in, pos, l) || !get(in, pos, k) || !get(in, pos, n))
    return false;
  if (kind != key.kind || g != key.g || mult != key.mult || l != key.l || k != key.k) return false;
  CountTable t;
  t.g = g;
  t.mult = mult;
  t.l = l;
  t.k = k;
  for (uint64_t i = 0; i < n; ++i) {
    uint32_t len = 0, dl = 0;
    if (!get(in, pos, len)) return false;
    std::vector<int64_t> kv(len);
    for (auto& x : kv)
      if (!get(in, pos, x)) return false;
    if (!get(in, pos, dl) || pos + dl > in.size()) return false;
    BigInt c(in.substr(pos, dl));
    pos += dl;
    t.total += c;
    t.counts.emplace(std::move(kv), c);
  }
  if (pos != in.size()) return false;
  out = std::move(t);
  return true;
}

bool cache_load(const CacheKey& key, CountTable& out) {
  if (cache_dir().empty()) return false;
  std::ifstream f(cache_path(key), std::ios::binary);
  if (!f) return false;
  std::stringstream ss;
  ss << f.rdbuf();
  return decode_table(ss.str(), key, out);
}

void cache_store(const CacheKey& key, const CountTable& table) {
  std::string dir = cache_dir();
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string path = cache_path(key);
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::io, "cannot write cache file " + tmp);
    std::string bytes = encode_table(key, table);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "cannot move cache file into place: " + path);
}

}  // namespace wl
