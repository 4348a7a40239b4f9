#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "splearn/engine.hpp"

namespace splearn {

/// One line-delimited structured record per completed iteration. Timing is
/// deliberately not serialized: record files for a fixed seed must be
/// byte-identical across runs.
std::string record_to_line(const RunRecord& record);
RunRecord record_from_line(const std::string& line, const FeatureCatalog& catalog);

/// Terminal summary line for a run (appended after the records).
std::string run_summary_line(const RunResult& result, const std::string& policy,
                             int replication);

/// Append-only JSONL writer; flushes per line.
class RecordWriter {
 public:
  explicit RecordWriter(const std::string& path);
  void write_record(const RunRecord& record);
  void write_line(const std::string& line);

 private:
  std::ofstream out_;
};

struct RecordFile {
  std::string policy;
  int replication = 0;
  std::vector<RunRecord> records;
  double final_best_u = -1.0;
  std::optional<double> final_best_true_utility;
  std::string stop_reason;
  int realized_steps = 0;
};

/// Reads one record file back (records plus the summary line).
RecordFile read_record_file(const std::string& path, const FeatureCatalog& catalog);

}  // namespace splearn
