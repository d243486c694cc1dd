#include "crossfire/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crossfire/error.h"

namespace fs = std::filesystem;

namespace crossfire {

SnapshotPtr InMemoryCorpus::LoadOriginal(int64_t run,
                                         const std::string& test_id) const {
  const auto it =
      snapshots_.find(Key(std::string(kOriginalVersion), run, test_id));
  if (it == snapshots_.end()) {
    throw IoError("no original snapshot for run " + std::to_string(run) +
                  ", test '" + test_id + "'");
  }
  return it->second;
}

SnapshotPtr InMemoryCorpus::LoadMutant(const std::string& mutant_id,
                                       const std::string& test_id) const {
  const auto it = snapshots_.find(Key(mutant_id, 0, test_id));
  if (it == snapshots_.end()) {
    throw IoError("no snapshot for mutant '" + mutant_id + "', test '" +
                  test_id + "'");
  }
  return it->second;
}

void InMemoryCorpus::Add(TestRunSnapshot snapshot) {
  Key key(snapshot.program_version, snapshot.run_index, snapshot.test_id);
  snapshots_.insert_or_assign(
      std::move(key), std::make_shared<const TestRunSnapshot>(std::move(snapshot)));
}

void InMemoryCorpus::Remove(const std::string& program_version, int64_t run,
                            const std::string& test_id) {
  snapshots_.erase(Key(program_version, run, test_id));
}

std::vector<SnapshotPtr> InMemoryCorpus::All() const {
  std::vector<SnapshotPtr> out;
  out.reserve(snapshots_.size());
  for (const auto& [key, snap] : snapshots_) out.push_back(snap);
  return out;
}

fs::path OriginalSnapshotPath(const fs::path& root, int64_t run,
                              const std::string& test_id) {
  return root / "runs" / "original" / ("run-" + std::to_string(run)) /
         (test_id + ".snap.json");
}

fs::path MutantSnapshotPath(const fs::path& root, const std::string& mutant_id,
                            const std::string& test_id) {
  return root / "runs" / "mutants" / mutant_id / (test_id + ".snap.json");
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return std::move(buf).str();
}

void WriteFile(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw IoError("cannot create directory '" + path.parent_path().string() +
                  "': " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing '" + path.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot write '" + path.string() + "': " + ec.message());
}

DirectoryCorpus::DirectoryCorpus(fs::path root) : root_(std::move(root)) {
  const fs::path manifest = root_ / "manifest.json";
  if (!fs::is_regular_file(manifest)) {
    throw IoError("no manifest.json in corpus '" + root_.string() + "'");
  }
  manifest_ = ParseManifest(ReadFile(manifest));
}

namespace {

SnapshotPtr LoadSnapshotFile(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw IoError("missing snapshot '" + path.string() + "'");
  }
  return std::make_shared<const TestRunSnapshot>(ParseSnapshot(ReadFile(path)));
}

}  // namespace

SnapshotPtr DirectoryCorpus::LoadOriginal(int64_t run,
                                          const std::string& test_id) const {
  return LoadSnapshotFile(OriginalSnapshotPath(root_, run, test_id));
}

SnapshotPtr DirectoryCorpus::LoadMutant(const std::string& mutant_id,
                                        const std::string& test_id) const {
  return LoadSnapshotFile(MutantSnapshotPath(root_, mutant_id, test_id));
}

std::vector<fs::path> DirectoryCorpus::SnapshotFiles() const {
  std::vector<fs::path> files;
  const fs::path runs = root_ / "runs";
  if (!fs::is_directory(runs)) return files;
  for (const auto& entry : fs::recursive_directory_iterator(runs)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 10 && name.ends_with(".snap.json")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void WriteCorpus(const InMemoryCorpus& corpus, const fs::path& root) {
  WriteFile(root / "manifest.json", SerializeManifest(corpus.manifest()));
  for (const SnapshotPtr& s : corpus.All()) {
    const fs::path path =
        s->is_original() ? OriginalSnapshotPath(root, s->run_index, s->test_id)
                         : MutantSnapshotPath(root, s->program_version, s->test_id);
    WriteFile(path, Serialize(*s));
  }
}

}  // namespace crossfire
