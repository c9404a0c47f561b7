#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phimask/document.hpp"
#include "phimask/error.hpp"

namespace phimask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json rect_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw IoError("bbox must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const fs::path& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(where.string() + ": " + e.what());
  }
}

}  // namespace

void write_document(const Document& doc, const fs::path& dir) {
  json elements = json::array();
  for (const auto& e : doc.elements) {
    elements.push_back({{"text", e.text}, {"bbox", rect_json(e.bbox)}});
  }
  json body = {{"id", doc.id},
               {"page_width", doc.page.width},
               {"page_height", doc.page.height},
               {"seed", doc.seed},
               {"template", doc.template_id},
               {"elements", std::move(elements)}};
  write_text(dir / (doc.id + ".document.json"), body.dump(2) + "\n");

  std::string sidecar;
  for (const auto& a : doc.annotations) {
    json rec = {{"doc_id", doc.id},
                {"category", std::string(to_string(a.category))},
                {"x", a.bbox.x},
                {"y", a.bbox.y},
                {"w", a.bbox.w},
                {"h", a.bbox.h},
                {"value", a.value},
                {"context_label", a.context_label},
                {"context_bbox", rect_json(a.context_bbox)}};
    sidecar += rec.dump() + "\n";
  }
  write_text(dir / (doc.id + ".annotations.jsonl"), sidecar);
}

Document read_document(const fs::path& dir, const std::string& id) {
  const fs::path doc_path = dir / (id + ".document.json");
  const json body = parse_json(read_text(doc_path), doc_path);

  Document doc;
  try {
    doc.id = body.at("id").get<std::string>();
    doc.page = {body.at("page_width").get<int>(), body.at("page_height").get<int>()};
    doc.seed = body.at("seed").get<std::uint64_t>();
    doc.template_id = body.at("template").get<std::string>();
    for (const auto& e : body.at("elements")) {
      doc.elements.push_back({e.at("text").get<std::string>(), rect_from(e.at("bbox"))});
    }
  } catch (const json::exception& e) {
    throw IoError(doc_path.string() + ": " + e.what());
  }

  const fs::path ann_path = dir / (id + ".annotations.jsonl");
  std::istringstream lines(read_text(ann_path));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json rec = parse_json(line, ann_path);
    try {
      auto category = parse_category(rec.at("category").get<std::string>());
      if (!category) throw IoError(ann_path.string() + ": unknown category");
      if (rec.at("doc_id").get<std::string>() != doc.id) {
        throw IoError(ann_path.string() + ": record belongs to another document");
      }
      doc.annotations.push_back({*category,
                                 {rec.at("x").get<int>(), rec.at("y").get<int>(),
                                  rec.at("w").get<int>(), rec.at("h").get<int>()},
                                 rec.at("value").get<std::string>(),
                                 rec.at("context_label").get<std::string>(),
                                 rect_from(rec.at("context_bbox"))});
    } catch (const json::exception& e) {
      throw IoError(ann_path.string() + ": " + e.what());
    }
  }
  return doc;
}

std::vector<ManifestEntry> write_corpus(std::size_t n, std::uint64_t corpus_seed,
                                        const fs::path& dir, std::string_view template_id) {
  if (n < 1) throw ConfigError("corpus size must be at least 1");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<ManifestEntry> manifest;
  json entries = json::array();
  for (const Document& doc : generate_corpus(n, corpus_seed, template_id)) {
    write_document(doc, dir);
    manifest.push_back({doc.id, doc.seed, doc.template_id});
    entries.push_back({{"id", doc.id}, {"seed", doc.seed}, {"template", doc.template_id}});
  }
  json body = {{"corpus_seed", corpus_seed}, {"count", n}, {"documents", std::move(entries)}};
  write_text(dir / "manifest.json", body.dump(2) + "\n");
  return manifest;
}

std::vector<Document> read_corpus(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw IoError("missing corpus manifest: " + manifest_path.string());
  const json manifest = parse_json(read_text(manifest_path), manifest_path);
  std::vector<Document> docs;
  try {
    for (const auto& entry : manifest.at("documents")) {
      docs.push_back(read_document(dir, entry.at("id").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  if (docs.empty()) throw IoError("corpus " + dir.string() + " is empty");
  return docs;
}

}  // namespace phimask
