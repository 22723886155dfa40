#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "trolldetect/corpus.hpp"
#include "trolldetect/features.hpp"
#include "trolldetect/util/artifact.hpp"

namespace trolldetect {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Feature rows of a dataset, aligned to one schema.
struct LabeledMatrix {
  FeatureSchema schema;
  std::vector<std::string> ids;
  std::vector<Label> labels;
  SparseRows X;

  std::size_t rows() const { return ids.size(); }
};

/// 1 for trolls, 0 for controls; throws on unlabeled rows.
inline std::vector<int> binary_labels(const std::vector<Label>& labels) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (auto l : labels) {
    if (l == Label::kUnlabeled) throw ValidationError("training rows must be labeled troll or control");
    y.push_back(l == Label::kTroll ? 1 : 0);
  }
  return y;
}

/// Keeps only troll/control rows.
inline LabeledMatrix labeled_subset(const LabeledMatrix& m) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (m.labels[i] != Label::kUnlabeled) keep.push_back(static_cast<Eigen::Index>(i));
  if (keep.size() == m.rows()) return m;
  LabeledMatrix out;
  out.schema = m.schema;
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.ids.push_back(m.ids[static_cast<std::size_t>(keep[r])]);
    out.labels.push_back(m.labels[static_cast<std::size_t>(keep[r])]);
    for (SparseRows::InnerIterator it(m.X, keep[r]); it; ++it) trip.emplace_back(static_cast<std::int64_t>(r), it.col(), it.value());
  }
  out.X.resize(static_cast<Eigen::Index>(keep.size()), m.X.cols());
  out.X.setFromTriplets(trip.begin(), trip.end());
  return out;
}

struct FeaturizeResult {
  LabeledMatrix matrix;
  std::set<std::string> dropped_languages;
};

/// Assembles every timeline against `schema`. Languages missing from the
/// schema are dropped and reported once each on `log`.
inline FeaturizeResult featurize_dataset(const Dataset& ds, const FeatureSchema& schema, Timestamp reference_date,
                                         std::ostream* log = &std::clog) {
  const Assembler assembler(schema);
  FeaturizeResult res;
  res.matrix.schema = schema;
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  for (std::size_t r = 0; r < ds.timelines.size(); ++r) {
    const auto& tl = ds.timelines[r];
    auto fv = assembler.assemble(tl, reference_date);
    for (std::size_t c = 0; c < fv.values.size(); ++c) {
      if (fv.values[c] != 0.0) trip.emplace_back(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), fv.values[c]);
    }
    for (auto& l : fv.dropped_languages) {
      if (res.dropped_languages.insert(l).second && log != nullptr) {
        *log << "warning: language '" << l << "' is not in the schema; its tweets are ignored\n";
      }
    }
    res.matrix.ids.push_back(tl.account.id);
    res.matrix.labels.push_back(tl.account.label);
  }
  res.matrix.X.resize(static_cast<Eigen::Index>(ds.timelines.size()), static_cast<Eigen::Index>(schema.size()));
  res.matrix.X.setFromTriplets(trip.begin(), trip.end());
  res.matrix.X.makeCompressed();
  return res;
}

inline constexpr const char* kSchemaFormat = "trolldetect-schema";
inline constexpr int kSchemaVersion = 1;

inline std::string serialize_schema(const FeatureSchema& schema, const Provenance& prov) {
  return encode_artifact(kSchemaFormat, kSchemaVersion, prov, schema.to_json(), Encoding::kJsonText);
}

inline FeatureSchema load_schema(const std::string& path) {
  auto art = decode_artifact(read_file(path), kSchemaFormat, kSchemaVersion, Encoding::kJsonText, path);
  return FeatureSchema::from_json(art.payload);
}

// ---------------------------------------------------------------------------
// vectors.bin: 8-byte magic, u64 header length, CBOR header (artifact
// envelope whose payload is the schema plus row count), then one record per
// row: u32 id length, id bytes, u8 label, u32 nnz, nnz x u32 column,
// nnz x f64 value. Integers and doubles are little-endian.

inline constexpr char kVectorsMagic[8] = {'T', 'D', 'V', 'E', 'C', 'S', '0', '1'};
inline constexpr const char* kVectorsFormat = "trolldetect-vectors";
inline constexpr int kVectorsVersion = 1;

namespace detail {

template <typename T>
void put(std::string& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("vectors: truncated file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

inline std::uint8_t label_code(Label l) { return static_cast<std::uint8_t>(l); }

}  // namespace detail

inline std::string serialize_vectors(const LabeledMatrix& m, const Provenance& prov) {
  std::string rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    detail::put<std::uint32_t>(rows, static_cast<std::uint32_t>(m.ids[r].size()));
    rows += m.ids[r];
    detail::put<std::uint8_t>(rows, detail::label_code(m.labels[r]));
    const auto row = static_cast<Eigen::Index>(r);
    std::uint32_t nnz = 0;
    for (SparseRows::InnerIterator it(m.X, row); it; ++it) ++nnz;
    detail::put<std::uint32_t>(rows, nnz);
    for (SparseRows::InnerIterator it(m.X, row); it; ++it) detail::put<std::uint32_t>(rows, static_cast<std::uint32_t>(it.col()));
    for (SparseRows::InnerIterator it(m.X, row); it; ++it) detail::put<double>(rows, it.value());
  }
  json payload{{"schema", m.schema.to_json()}, {"rows", m.rows()}, {"rows_sha256", sha256_hex(rows)}};
  const std::string header = encode_artifact(kVectorsFormat, kVectorsVersion, prov, payload, Encoding::kCbor);
  std::string out(kVectorsMagic, sizeof(kVectorsMagic));
  detail::put<std::uint64_t>(out, header.size());
  out += header;
  out += rows;
  return out;
}

struct LoadedVectors {
  LabeledMatrix matrix;
  Provenance provenance;
  std::string content_sha256;
};

inline LoadedVectors deserialize_vectors(const std::string& bytes, const std::string& origin = "vectors") {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kVectorsMagic, 8) != 0) {
    throw ValidationError(origin + ": not a vectors file");
  }
  std::size_t pos = 8;
  const auto header_len = detail::take<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw ValidationError(origin + ": truncated header");
  auto art = decode_artifact(bytes.substr(pos, header_len), kVectorsFormat, kVectorsVersion, Encoding::kCbor, origin);
  pos += header_len;
  const std::string rows_blob = bytes.substr(pos);
  if (sha256_hex(rows_blob) != art.payload.at("rows_sha256").get<std::string>()) {
    throw ValidationError(origin + ": row data digest mismatch");
  }
  LoadedVectors out;
  out.provenance = art.provenance;
  out.content_sha256 = sha256_hex(bytes);
  auto& m = out.matrix;
  m.schema = FeatureSchema::from_json(art.payload.at("schema"));
  const auto n = art.payload.at("rows").get<std::size_t>();
  const auto cols = static_cast<std::uint32_t>(m.schema.size());
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  std::size_t p = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto id_len = detail::take<std::uint32_t>(rows_blob, p);
    if (p + id_len > rows_blob.size()) throw ValidationError(origin + ": truncated row");
    m.ids.push_back(rows_blob.substr(p, id_len));
    p += id_len;
    const auto code = detail::take<std::uint8_t>(rows_blob, p);
    if (code > 2) throw ValidationError(origin + ": bad label code");
    m.labels.push_back(static_cast<Label>(code));
    const auto nnz = detail::take<std::uint32_t>(rows_blob, p);
    std::vector<std::uint32_t> idx(nnz);
    for (auto& c : idx) {
      c = detail::take<std::uint32_t>(rows_blob, p);
      if (c >= cols) throw ValidationError(origin + ": column index out of range");
    }
    for (std::uint32_t k = 0; k < nnz; ++k) {
      trip.emplace_back(static_cast<std::int64_t>(r), idx[k], detail::take<double>(rows_blob, p));
    }
  }
  if (p != rows_blob.size()) throw ValidationError(origin + ": trailing bytes after last row");
  m.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  m.X.setFromTriplets(trip.begin(), trip.end());
  m.X.makeCompressed();
  return out;
}

inline LoadedVectors load_vectors(const std::string& path) { return deserialize_vectors(read_file(path), path); }

}  // namespace trolldetect
