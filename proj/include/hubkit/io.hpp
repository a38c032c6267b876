#pragma once

#include <filesystem>
#include <string>

#include "hubkit/core.hpp"
#include "hubkit/retrieval.hpp"

namespace hubkit::io {

// Binary layouts (all integers and floats little-endian):
//   EMB1: "EMB1" | rows u32 | dim u32  | rows*dim float32, row-major
//   SIM1: "SIM1" | rows u32 | cols u32 | rows*cols float32, row-major
// Values are held as double in memory and narrowed to float32 on write.

struct EmbeddingRead {
  EmbeddingSet set;
  /// max_i | ||row_i|| - 1 | of the rows as stored on disk.
  double max_norm_deviation = 0.0;
};

EmbeddingRead read_embeddings(const std::filesystem::path& path, bool renormalize = false);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

SimilarityMatrix read_similarity(const std::filesystem::path& path);
void write_similarity(const SimilarityMatrix& s, const std::filesystem::path& path);

/// The values a SIM1 round trip would produce.
Matrix round_to_float(const Matrix& m);

/// One line per query; whitespace-separated target indices.
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);

/// {"r_at": {"1": ...}, "mdr": ..., "mnr": ..., "skewness": ...,
///  "normalization": ..., "params": {...}}, keys in that order; "skewness"
/// is omitted when absent.
std::string report_to_json(const RetrievalReport& report);
RetrievalReport report_from_json(const std::string& text);
void write_report(const RetrievalReport& report, const std::filesystem::path& path);

}  // namespace hubkit::io
