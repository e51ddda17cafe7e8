#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace kmgr::data {

/// Ordered genre label set; index is position in `names`.
class GenreRegistry {
 public:
  GenreRegistry() = default;
  explicit GenreRegistry(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  std::size_t index(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ManifestEntry {
  std::string path;
  std::uint32_t genre_index = 0;
  std::string source_id;
};

/// Labeled clip listing. Serialized as JSON:
///   {"version": 1, "genres": [...], "entries": [{"path", "genre", "source_id"}]}
/// Relative entry paths are resolved against the manifest's directory.
struct Manifest {
  GenreRegistry registry;
  std::vector<ManifestEntry> entries;

  void validate() const;
};

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

/// Seeded uniform subsampling without replacement down to per_genre clips
/// per genre (registry order preserved, per-genre order shuffled). Throws
/// naming the deficient genre when one has fewer than per_genre clips.
Manifest balance(const Manifest& m, std::size_t per_genre, std::uint64_t seed);

}  // namespace kmgr::data
