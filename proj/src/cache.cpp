#include "kshock/cache.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace kshock {

std::string cache_dir()
{
  const char* env = std::getenv("KINETIC_SHOCK_CACHE");
  return env ? std::string(env) : std::string();
}

void save_matrix(const std::string& key, const Mat& m, const nlohmann::json& meta)
{
  const std::string dir = cache_dir();
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  const std::string stem = dir + "/" + key;
  {
    std::ofstream os(stem + ".bin", std::ios::binary);
    std::int64_t r = m.rows(), c = m.cols();
    os.write(reinterpret_cast<const char*>(&r), sizeof r);
    os.write(reinterpret_cast<const char*>(&c), sizeof c);
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  std::ofstream js(stem + ".json");
  js << meta.dump(2) << '\n';
}

std::optional<Mat> load_matrix(const std::string& key, const nlohmann::json& meta)
{
  const std::string dir = cache_dir();
  if (dir.empty()) return std::nullopt;
  const std::string stem = dir + "/" + key;
  std::ifstream js(stem + ".json");
  if (!js) return std::nullopt;
  nlohmann::json stored;
  try {
    js >> stored;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (stored != meta) return std::nullopt;
  std::ifstream is(stem + ".bin", std::ios::binary);
  if (!is) return std::nullopt;
  std::int64_t r = 0, c = 0;
  is.read(reinterpret_cast<char*>(&r), sizeof r);
  is.read(reinterpret_cast<char*>(&c), sizeof c);
  if (!is || r <= 0 || c <= 0) return std::nullopt;
  Mat m(r, c);
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!is) return std::nullopt;
  return m;
}

}  // namespace kshock
