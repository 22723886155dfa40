#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "trolldetect/util/error.hpp"
#include "trolldetect/util/hash.hpp"
#include "trolldetect/version.hpp"

namespace trolldetect {

using json = nlohmann::json;

/// Where an artifact came from. Written into every output and checked on
/// reload.
struct Provenance {
  std::string config_hash;
  std::map<std::string, std::string> inputs;  // logical name -> sha256

  json to_json() const { return json{{"config_hash", config_hash}, {"inputs", inputs}}; }
  static Provenance from_json(const json& j) {
    Provenance p;
    p.config_hash = j.at("config_hash").get<std::string>();
    p.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    return p;
  }
};

inline std::string canonical_dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

enum class Encoding { kCbor, kJsonText };

/// Wraps a payload in a self-describing envelope:
///   format, format_version, tool_version, provenance, payload_sha256, payload
inline std::string encode_artifact(const std::string& format, int version, const Provenance& prov,
                                   const json& payload, Encoding enc) {
  json doc;
  doc["format"] = format;
  doc["format_version"] = version;
  doc["tool_version"] = kToolVersion;
  doc["provenance"] = prov.to_json();
  doc["payload_sha256"] = sha256_hex(canonical_dump(payload));
  doc["payload"] = payload;
  if (enc == Encoding::kCbor) {
    auto bytes = json::to_cbor(doc);
    return std::string(bytes.begin(), bytes.end());
  }
  return doc.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

struct LoadedArtifact {
  Provenance provenance;
  std::string payload_sha256;
  json payload;
};

/// Reverse of encode_artifact. Any mismatch in format, version, tool version
/// or payload digest is a hard error.
inline LoadedArtifact decode_artifact(const std::string& bytes, const std::string& format,
                                      int version, Encoding enc, const std::string& origin) {
  json doc;
  try {
    doc = enc == Encoding::kCbor ? json::from_cbor(bytes) : json::parse(bytes);
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": not a readable " + format + " artifact (" + e.what() + ")");
  }
  auto field = [&](const char* key) -> const json& {
    if (!doc.is_object() || !doc.contains(key)) {
      throw ValidationError(origin + ": artifact is missing '" + key + "'");
    }
    return doc.at(key);
  };
  if (field("format") != format) {
    throw ValidationError(origin + ": expected a " + format + " artifact, found '" +
                          field("format").get<std::string>() + "'");
  }
  if (field("format_version") != version) {
    throw ValidationError(origin + ": unsupported " + format + " version " +
                          field("format_version").dump());
  }
  if (field("tool_version") != kToolVersion) {
    throw ValidationError(origin + ": written by '" + field("tool_version").get<std::string>() +
                          "', this is '" + kToolVersion + "'");
  }
  LoadedArtifact out;
  out.provenance = Provenance::from_json(field("provenance"));
  out.payload_sha256 = field("payload_sha256").get<std::string>();
  out.payload = std::move(doc.at("payload"));
  if (sha256_hex(canonical_dump(out.payload)) != out.payload_sha256) {
    throw ValidationError(origin + ": payload digest mismatch (corrupt or edited artifact)");
  }
  return out;
}

/// Sidecar metadata for plain-text reports (CSV/Markdown) whose column
/// layout must stay exact.
inline void write_report(const std::string& path, const std::string& body, const Provenance& prov) {
  write_file(path, body);
  json meta;
  meta["tool_version"] = kToolVersion;
  meta["provenance"] = prov.to_json();
  meta["sha256"] = sha256_hex(body);
  write_file(path + ".meta.json", meta.dump(1) + "\n");
}

struct LoadedReport {
  std::string body;
  Provenance provenance;
};

/// Reads a report written by write_report and checks it against its sidecar.
inline LoadedReport read_report(const std::string& path) {
  LoadedReport r;
  r.body = read_file(path);
  json meta;
  try {
    meta = json::parse(read_file(path + ".meta.json"));
    if (meta.at("tool_version") != kToolVersion) {
      throw ValidationError(path + ": written by '" + meta.at("tool_version").get<std::string>() + "'");
    }
    if (meta.at("sha256") != sha256_hex(r.body)) throw ValidationError(path + ": content does not match its .meta.json digest");
    r.provenance = Provenance::from_json(meta.at("provenance"));
  } catch (const json::exception& e) {
    throw ValidationError(path + ".meta.json: " + e.what());
  }
  return r;
}

}  // namespace trolldetect
