#include "discpar/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "discpar/error.hpp"

namespace discpar {

namespace {

using nlohmann::json;

json kind_json(const KindMetrics& m) {
  json classes = json::array();
  for (const ClassScores& c : m.classes) {
    classes.push_back({{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
                       {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}});
  }
  return {{"macro_f1", m.macro_f1}, {"accuracy", m.accuracy}, {"count", m.count},
          {"correct", m.correct}, {"classes", classes}};
}

KindMetrics kind_from(const json& j) {
  KindMetrics m;
  m.macro_f1 = j.at("macro_f1").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  m.count = j.at("count").get<std::size_t>();
  m.correct = j.at("correct").get<std::size_t>();
  for (const json& c : j.at("classes")) {
    m.classes.push_back({c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                         c.at("fn").get<std::size_t>(), c.at("precision").get<double>(),
                         c.at("recall").get<double>(), c.at("f1").get<double>()});
  }
  return m;
}

json metrics_json(const Metrics& m) {
  json j = {{"num_classes", m.num_classes},
            {"implicit", kind_json(m.implicit)},
            {"explicit", kind_json(m.explicit_)}};
  json buckets = json::array();
  for (const BucketMetrics& b : m.buckets) {
    buckets.push_back({{"bucket", b.bucket},
                       {"implicit", kind_json(b.implicit)},
                       {"explicit", kind_json(b.explicit_)}});
  }
  j["buckets"] = buckets;
  return j;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string metrics_to_json(const Metrics& metrics, int indent) {
  return metrics_json(metrics).dump(indent);
}

Metrics metrics_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Metrics m;
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.implicit = kind_from(j.at("implicit"));
    m.explicit_ = kind_from(j.at("explicit"));
    if (j.contains("buckets")) {
      for (const json& b : j.at("buckets")) {
        m.buckets.push_back({b.at("bucket").get<std::string>(), kind_from(b.at("implicit")),
                             kind_from(b.at("explicit"))});
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("metrics json: ") + e.what());
  }
}

std::string report_to_json(const RunReport& report, int indent) {
  json epochs = json::array();
  for (const EpochRecord& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"steps", e.steps},
                      {"dev", metrics_json(e.dev)}});
  }
  json j = {{"config", format_config(report.config)},
            {"seed", report.seed},
            {"epochs", epochs},
            {"selected_epoch", report.selected_epoch},
            {"dev", metrics_json(report.dev)},
            {"wall_seconds", report.wall_seconds}};
  j["test"] = report.test ? metrics_json(*report.test) : json(nullptr);
  return j.dump(indent);
}

std::string bucket_csv(const Metrics& metrics) {
  std::ostringstream out;
  out.precision(6);
  out << "bucket,macro_f1,accuracy,count\n";
  for (const BucketMetrics& b : metrics.buckets) {
    out << b.bucket << ',' << b.implicit.macro_f1 << ',' << b.implicit.accuracy << ','
        << b.implicit.count << '\n';
  }
  return out.str();
}

void emit_metrics(const Metrics& metrics, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_text(dir / "metrics.json", metrics_to_json(metrics) + "\n");
  write_text(dir / "buckets.csv", bucket_csv(metrics));
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_text(dir / "report.json", report_to_json(report) + "\n");
  emit_metrics(report.test ? *report.test : report.dev, dir);
}

Metrics load_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return metrics_from_json(text.str());
}

}  // namespace discpar
