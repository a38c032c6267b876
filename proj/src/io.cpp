#include "hubkit/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace hubkit::io {
namespace {

constexpr std::size_t kHeaderBytes = 12;

std::string where(const std::filesystem::path& path, std::size_t offset) {
  return path.string() + " at byte " + std::to_string(offset);
}

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<unsigned char>(v >> shift));
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

// Parses a magic-tagged float32 matrix; nothing is returned unless the whole
// file is well formed.
Matrix decode_matrix(const std::vector<unsigned char>& bytes, std::string_view magic,
                     const std::filesystem::path& path) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::TruncatedFile, "header needs 12 bytes, " + where(path, bytes.size()));
  }
  if (std::memcmp(bytes.data(), magic.data(), 4) != 0) {
    throw Error(ErrorCode::BadMagic, "expected " + std::string(magic) + ", " + where(path, 0));
  }
  const std::uint32_t rows = load_u32(bytes.data() + 4);
  const std::uint32_t cols = load_u32(bytes.data() + 8);
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::SizeMismatch, "zero-sized header (" + std::to_string(rows) + "x" +
                                             std::to_string(cols) + "), " + where(path, 4));
  }
  const std::uint64_t payload = std::uint64_t{rows} * cols * 4;
  const std::uint64_t available = bytes.size() - kHeaderBytes;
  if (available < payload) {
    throw Error(ErrorCode::TruncatedFile, "payload needs " + std::to_string(payload) + " bytes, " +
                                              where(path, bytes.size()));
  }
  if (available > payload) {
    throw Error(ErrorCode::SizeMismatch, "trailing bytes after payload, " +
                                             where(path, kHeaderBytes + payload));
  }
  Matrix m(rows, cols);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (Index k = 0; k < m.size(); ++k, p += 4) {
    const float value = std::bit_cast<float>(load_u32(p));
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonFiniteInput, "non-finite value, " +
                                                 where(path, kHeaderBytes + 4 * static_cast<std::size_t>(k)));
    }
    m.data()[k] = value;
  }
  return m;
}

std::vector<unsigned char> encode_matrix(const Matrix& m, std::string_view magic) {
  std::vector<unsigned char> bytes(magic.begin(), magic.end());
  bytes.reserve(kHeaderBytes + 4 * static_cast<std::size_t>(m.size()));
  store_u32(bytes, static_cast<std::uint32_t>(m.rows()));
  store_u32(bytes, static_cast<std::uint32_t>(m.cols()));
  for (Index k = 0; k < m.size(); ++k) {
    store_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[k])));
  }
  return bytes;
}

}  // namespace

EmbeddingRead read_embeddings(const std::filesystem::path& path, bool renormalize) {
  Matrix raw = decode_matrix(read_all(path), "EMB1", path);
  const double deviation = (raw.rowwise().norm().array() - 1.0).abs().maxCoeff();
  if (renormalize) return {l2_normalize(raw), deviation};
  return {EmbeddingSet(std::move(raw)), deviation};
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_all(path, encode_matrix(set.data(), "EMB1"));
}

SimilarityMatrix read_similarity(const std::filesystem::path& path) {
  return SimilarityMatrix(decode_matrix(read_all(path), "SIM1", path));
}

void write_similarity(const SimilarityMatrix& s, const std::filesystem::path& path) {
  write_all(path, encode_matrix(s.values(), "SIM1"));
}

Matrix round_to_float(const Matrix& m) { return m.cast<float>().cast<double>(); }

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::uint32_t> targets;
    long long index = 0;
    while (fields >> index) {
      if (index < 0) {
        throw Error(ErrorCode::IndexOutOfRange, path.string() + " line " + std::to_string(line_no));
      }
      targets.push_back(static_cast<std::uint32_t>(index));
    }
    if (!fields.eof() || targets.empty()) {
      throw Error(ErrorCode::IoFailure, "malformed " + path.string() + " line " + std::to_string(line_no));
    }
    gt.pairs.push_back(std::move(targets));
  }
  return gt;
}

void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  for (const auto& targets : gt.pairs) {
    for (std::size_t k = 0; k < targets.size(); ++k) out << (k ? " " : "") << targets[k];
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

std::string report_to_json(const RetrievalReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json r_at = nlohmann::ordered_json::object();
  for (const auto& [k, value] : report.r_at) r_at[std::to_string(k)] = value;
  doc["r_at"] = std::move(r_at);
  doc["mdr"] = report.mdr;
  doc["mnr"] = report.mnr;
  if (report.skewness) doc["skewness"] = *report.skewness;
  doc["normalization"] = report.normalization;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  doc["params"] = std::move(params);
  return doc.dump(2) + "\n";
}

RetrievalReport report_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::ordered_json::parse(text);
    RetrievalReport report;
    for (const auto& [key, value] : doc.at("r_at").items()) {
      report.r_at[std::stoll(key)] = value.get<double>();
    }
    report.mdr = doc.at("mdr").get<double>();
    report.mnr = doc.at("mnr").get<double>();
    if (doc.contains("skewness")) report.skewness = doc["skewness"].get<double>();
    report.normalization = doc.at("normalization").get<std::string>();
    for (const auto& [key, value] : doc.at("params").items()) {
      report.params.emplace_back(key, value.get<double>());
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed report: ") + e.what());
  }
}

void write_report(const RetrievalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << report_to_json(report);
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace hubkit::io
