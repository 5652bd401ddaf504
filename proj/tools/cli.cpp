#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "squish/csv.hpp"
#include "squish/storage.hpp"

namespace squish::cli {

namespace {

struct CompressArgs {
  std::string input;
  std::string schema;
  std::string output;
  std::vector<std::string> tolerances;
  std::size_t sample_rows = 2000;
  std::size_t max_parents = 4;
  bool delta = false;
  bool index = false;
  bool random_sample = false;
  std::string structure;
  std::uint64_t seed = 0;
};

struct DecompressArgs {
  std::string archive;
  std::string output = "-";
};

struct InspectArgs {
  std::string archive;
  bool json = false;
};

struct GetArgs {
  std::string archive;
  std::size_t row = 0;
};

std::uint64_t file_size(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "'");
  return size;
}

int cmd_compress(const CompressArgs& a, std::ostream& out, std::ostream& err) {
  const IngestionConfig cfg = load_ingestion_config(a.schema);
  Dataset data = ingest_csv_file(a.input, cfg);

  std::optional<ToleranceSpec> global;
  std::map<std::string, ToleranceSpec> per_column;
  for (const auto& t : a.tolerances) {
    if (const auto eq = t.find('='); eq != std::string::npos) {
      per_column[t.substr(0, eq)] = ToleranceSpec::parse(t.substr(eq + 1));
    } else {
      global = ToleranceSpec::parse(t);
    }
  }
  data = with_tolerances(std::move(data), global, per_column);

  CompressOptions opts;
  opts.search.sample_rows = a.sample_rows;
  opts.search.max_parents = a.max_parents;
  opts.search.random_sample = a.random_sample;
  opts.search.seed = a.seed;
  opts.delta = a.delta;
  opts.index = a.index;
  if (!a.structure.empty()) {
    std::ifstream in(a.structure);
    if (!in) throw IoError("cannot open structure file '" + a.structure + "'");
    opts.structure = parse_structure(in, data.schema);
  }

  CompressStats stats;
  const auto bytes = compress(data, opts, &stats);
  write_file(a.output, bytes);

  if (stats.clamped > 0)
    err << "warning: " << stats.clamped << " values lay outside their declared range and were clamped\n";
  const std::uint64_t original = file_size(a.input);
  const double ratio = original ? static_cast<double>(bytes.size()) / static_cast<double>(original) : 0.0;
  const std::uint64_t total_bits = bytes.size() * 8;
  char line[160];
  std::snprintf(line, sizeof line, "ratio=%.6f model_bits=%llu data_bits=%llu framing_bits=%llu", ratio,
                static_cast<unsigned long long>(stats.model_bits), static_cast<unsigned long long>(stats.data_bits),
                static_cast<unsigned long long>(total_bits - stats.model_bits - stats.data_bits));
  out << line << "\n";
  return kOk;
}

int cmd_decompress(const DecompressArgs& a, std::ostream& out, std::ostream& err) {
  const Archive archive = Archive::parse(read_file(a.archive), true);
  std::ofstream file;
  std::ostream* dst = &out;
  if (a.output != "-") {
    file.open(a.output, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot create '" + a.output + "'");
    dst = &file;
  }
  const Schema& schema = archive.schema();
  std::vector<std::string> fields(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) fields[i] = schema.column(i).name;
  write_csv_row(*dst, fields);
  int code = kOk;
  try {
    archive.decode_all([&](const Tuple& t) {
      for (std::size_t i = 0; i < schema.size(); ++i) fields[i] = format_value(schema.column(i), t[i]);
      write_csv_row(*dst, fields);
    });
  } catch (const FormatError& e) {
    err << "error: corrupt archive: " << e.what() << "\n";
    code = kCorrupt;
  }
  dst->flush();
  if (!*dst) throw IoError("error writing output");
  return code;
}

nlohmann::json report_json(const ArchiveReport& r) {
  nlohmann::json j;
  j["version"] = r.version;
  j["rows"] = r.rows;
  j["bytes"] = r.total_bytes;
  j["flags"] = {{"delta", r.delta}, {"index", r.index}};
  j["bits"] = {{"model", r.model_bits}, {"data", r.data_bits}, {"framing", r.framing_bits}};
  j["edges"] = r.edges;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : r.columns) {
    j["columns"].push_back({{"name", c.name},
                            {"type", c.type},
                            {"tolerance", c.tolerance},
                            {"parents", c.parents},
                            {"model", c.model},
                            {"parameters", c.parameters},
                            {"model_bits", c.model_bits},
                            {"data_bits", c.data_bits}});
  }
  return j;
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const Archive archive = Archive::parse(read_file(a.archive));
  const ArchiveReport report = inspect(archive);
  if (a.json)
    out << report_json(report).dump(2) << "\n";
  else
    out << format_report(report);
  return kOk;
}

int cmd_get(const GetArgs& a, std::ostream& out) {
  const Archive archive = Archive::parse(read_file(a.archive));
  const Tuple t = archive.read_tuple_at(a.row);
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < archive.schema().size(); ++i)
    fields.push_back(format_value(archive.schema().column(i), t[i]));
  write_csv_row(out, fields);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compress tabular data with learned column dependencies", "squish"};
  app.require_subcommand(1);

  CompressArgs ca;
  auto* compress_cmd = app.add_subcommand("compress", "Compress a CSV file into an archive");
  compress_cmd->add_option("input", ca.input, "Input CSV file")->required();
  compress_cmd->add_option("--schema", ca.schema, "Schema file (key = value format)")->required();
  compress_cmd->add_option("-o,--output", ca.output, "Archive to write")->required();
  compress_cmd->add_option("--tolerance", ca.tolerances,
                           "Error tolerance: global value or percentage (1%), or column=value; repeatable");
  compress_cmd->add_option("--sample-rows", ca.sample_rows, "Rows used for structure learning")
      ->check(CLI::PositiveNumber);
  compress_cmd->add_option("--max-parents", ca.max_parents, "Maximum parents per column");
  compress_cmd->add_flag("--delta", ca.delta, "Delta-code sorted tuple codes (row order is not kept)");
  compress_cmd->add_flag("--index", ca.index, "Store a tuple offset index for random access");
  compress_cmd->add_option("--structure", ca.structure, "Structure file overriding the learned network");
  compress_cmd->add_option("--seed", ca.seed, "Seed for the random structure-learning sample");
  compress_cmd->add_flag("--random-sample", ca.random_sample, "Sample rows uniformly instead of taking the first ones");

  DecompressArgs da;
  auto* decompress_cmd = app.add_subcommand("decompress", "Write the rows of an archive as CSV");
  decompress_cmd->add_option("archive", da.archive, "Archive file")->required();
  decompress_cmd->add_option("-o,--output", da.output, "CSV file to write (- for stdout)");

  InspectArgs ia;
  auto* inspect_cmd = app.add_subcommand("inspect", "Describe an archive");
  inspect_cmd->add_option("archive", ia.archive, "Archive file")->required();
  inspect_cmd->add_flag("--json", ia.json, "Machine-readable output");

  GetArgs ga;
  auto* get_cmd = app.add_subcommand("get", "Print one row of an indexed archive");
  get_cmd->add_option("archive", ga.archive, "Archive file")->required();
  get_cmd->add_option("row", ga.row, "0-based row index")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compress_cmd) return cmd_compress(ca, out, err);
    if (*decompress_cmd) return cmd_decompress(da, out, err);
    if (*inspect_cmd) return cmd_inspect(ia, out);
    if (*get_cmd) return cmd_get(ga, out);
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << "\n";
    return kParse;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "error: corrupt archive: " << e.what() << "\n";
    return kCorrupt;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace squish::cli
