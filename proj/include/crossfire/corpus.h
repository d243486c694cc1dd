#ifndef CROSSFIRE_CORPUS_H_
#define CROSSFIRE_CORPUS_H_

// Access to a corpus of snapshots, either in memory or on disk:
//
//   <root>/manifest.json
//   <root>/runs/original/run-<k>/<test_id>.snap.json
//   <root>/runs/mutants/<mutant_id>/<test_id>.snap.json

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "crossfire/snapshot.h"

namespace crossfire {

using SnapshotPtr = std::shared_ptr<const TestRunSnapshot>;

// Implementations must be safe to call concurrently.
class CorpusReader {
 public:
  virtual ~CorpusReader() = default;
  virtual const MutantManifest& manifest() const = 0;
  // Both throw IoError when the snapshot does not exist or cannot be read,
  // and ParseError/ValidationError when it is malformed.
  virtual SnapshotPtr LoadOriginal(int64_t run, const std::string& test_id) const = 0;
  virtual SnapshotPtr LoadMutant(const std::string& mutant_id,
                                 const std::string& test_id) const = 0;
};

class InMemoryCorpus : public CorpusReader {
 public:
  InMemoryCorpus() = default;
  explicit InMemoryCorpus(MutantManifest manifest) : manifest_(std::move(manifest)) {}

  const MutantManifest& manifest() const override { return manifest_; }
  MutantManifest& mutable_manifest() { return manifest_; }
  SnapshotPtr LoadOriginal(int64_t run, const std::string& test_id) const override;
  SnapshotPtr LoadMutant(const std::string& mutant_id,
                         const std::string& test_id) const override;

  // Keyed by program_version/run_index/test_id of the snapshot.
  void Add(TestRunSnapshot snapshot);
  void Remove(const std::string& program_version, int64_t run,
              const std::string& test_id);

  // Every snapshot in (program_version, run, test) order.
  std::vector<SnapshotPtr> All() const;

 private:
  using Key = std::tuple<std::string, int64_t, std::string>;
  MutantManifest manifest_;
  std::map<Key, SnapshotPtr> snapshots_;
};

class DirectoryCorpus : public CorpusReader {
 public:
  // Reads and parses manifest.json; throws IoError if it is missing.
  explicit DirectoryCorpus(std::filesystem::path root);

  const MutantManifest& manifest() const override { return manifest_; }
  const std::filesystem::path& root() const { return root_; }
  SnapshotPtr LoadOriginal(int64_t run, const std::string& test_id) const override;
  SnapshotPtr LoadMutant(const std::string& mutant_id,
                         const std::string& test_id) const override;

  // Every *.snap.json under runs/, sorted by path.
  std::vector<std::filesystem::path> SnapshotFiles() const;

 private:
  std::filesystem::path root_;
  MutantManifest manifest_;
};

std::filesystem::path OriginalSnapshotPath(const std::filesystem::path& root,
                                           int64_t run, const std::string& test_id);
std::filesystem::path MutantSnapshotPath(const std::filesystem::path& root,
                                         const std::string& mutant_id,
                                         const std::string& test_id);

// Writes manifest.json and every snapshot in `corpus` under `root`.
void WriteCorpus(const InMemoryCorpus& corpus, const std::filesystem::path& root);

std::string ReadFile(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see partial data.
void WriteFile(const std::filesystem::path& path, std::string_view bytes);

}  // namespace crossfire

#endif  // CROSSFIRE_CORPUS_H_
