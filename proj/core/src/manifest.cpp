#include "kmgr/data/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::data {

GenreRegistry::GenreRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second)
      throw DataError("GenreRegistry: duplicate genre '" + names_[i] + "'");
  }
}

std::size_t GenreRegistry::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("GenreRegistry: unknown genre '" + name + "'");
  return it->second;
}

void Manifest::validate() const {
  if (registry.size() < 2) throw DataError("Manifest: need at least two genres");
  std::set<std::string> paths;
  for (const auto& e : entries) {
    if (e.genre_index >= registry.size())
      throw DataError("Manifest: genre index " + std::to_string(e.genre_index) + " out of range");
    if (!paths.insert(e.path).second)
      throw DataError("Manifest: duplicate clip path '" + e.path + "'");
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError(path + ": cannot open manifest");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1)
      throw DataError(path + ": unsupported manifest version");
    Manifest m;
    m.registry = GenreRegistry(j.at("genres").get<std::vector<std::string>>());
    const auto base = std::filesystem::path(path).parent_path();
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      if (std::filesystem::path(entry.path).is_relative())
        entry.path = (base / entry.path).string();
      entry.genre_index = static_cast<std::uint32_t>(m.registry.index(e.at("genre").get<std::string>()));
      entry.source_id = e.value("source_id", entry.path);
      m.entries.push_back(std::move(entry));
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": manifest schema mismatch: " + e.what());
  }
}

void save_manifest(const Manifest& m, const std::string& path) {
  m.validate();
  const auto base = std::filesystem::path(path).parent_path();
  nlohmann::json j;
  j["version"] = 1;
  j["genres"] = m.registry.names();
  auto entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    // store relative to the manifest when possible, for a relocatable corpus
    std::string p = e.path;
    if (!base.empty()) {
      std::error_code ec;
      auto rel = std::filesystem::relative(e.path, base, ec);
      if (!ec && !rel.empty()) p = rel.string();
    }
    entries.push_back({{"path", p},
                       {"genre", m.registry.name(e.genre_index)},
                       {"source_id", e.source_id}});
  }
  j["entries"] = std::move(entries);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");
  os << j.dump(2) << "\n";
  if (!os) throw DataError(path + ": write failure");
}

Manifest balance(const Manifest& m, std::size_t per_genre, std::uint64_t seed) {
  if (per_genre == 0) throw DataError("balance: per_genre must be positive");
  m.validate();

  std::vector<std::vector<std::size_t>> by_genre(m.registry.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i)
    by_genre[m.entries[i].genre_index].push_back(i);

  Rng rng(seed);
  Manifest out;
  out.registry = m.registry;
  for (std::size_t g = 0; g < by_genre.size(); ++g) {
    auto& pool = by_genre[g];
    if (pool.size() < per_genre)
      throw DataError("balance: genre '" + m.registry.name(g) + "' has " +
                      std::to_string(pool.size()) + " clips, need " + std::to_string(per_genre));
    rng.shuffle(pool);
    for (std::size_t i = 0; i < per_genre; ++i)
      out.entries.push_back(m.entries[pool[i]]);
  }
  return out;
}

}  // namespace kmgr::data
