#include "subrh/plots.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "subrh/ops.hpp"
#include "subrh/records_io.hpp"

namespace subrh {

namespace fs = std::filesystem;

namespace {

struct Script {
  std::string name;
  std::string text;
};

class ScriptBuilder {
 public:
  ScriptBuilder(std::string data, const RecordTable& table) : data_(std::move(data)), table_(table) {}

  std::string header(const std::string& title, const std::string& image) const {
    std::ostringstream os;
    os << "# " << title << " (" << table_.rows.size() << " data rows)\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output '" << image << "'\n"
       << "set title '" << title << "'\n";
    return os.str();
  }

  // One plot clause reading exactly the table's rows.
  std::string series(const std::string& x, const std::string& y, const std::string& style = "lines") const {
    std::ostringstream os;
    os << "'" << data_ << "' every ::0::" << table_.rows.size() - 1 << " using " << table_.column(x) + 1 << ":"
       << table_.column(y) + 1 << " with " << style;
    return os.str();
  }

 private:
  std::string data_;
  const RecordTable& table_;
};

double summary_exponent(const fs::path& records, const RecordTable& table, const std::string& x,
                        const std::string& y, std::string& source) {
  const fs::path summary = records.parent_path() / "summary.json";
  std::ifstream in(summary);
  if (in) {
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("fitted_exponent") && j["fitted_exponent"].is_number()) {
      source = "summary.json";
      return j["fitted_exponent"].get<double>();
    }
  }
  std::vector<double> lx, ly;
  for (const auto& row : table.rows) {
    lx.push_back(std::log(row[table.column(x)]));
    ly.push_back(std::log(row[table.column(y)]));
  }
  source = "regression over all rows";
  return lx.size() >= 2 ? linear_fit(lx, ly).first : std::nan("");
}

std::vector<Script> build(const fs::path& records, const fs::path& out_dir, const RecordTable& t) {
  const std::string data = fs::proximate(fs::absolute(records), fs::absolute(out_dir)).generic_string();
  const ScriptBuilder b(data, t);
  std::vector<Script> scripts;

  const std::string x = t.has_column("t") ? "t" : (t.has_column("s") ? "s" : "");
  if (!x.empty() && t.has_column("E_H")) {
    std::string text = b.header(x == "t" ? "energy vs t" : "energy along the homotopy", "energy.png");
    text += "set xlabel '" + x + "'\nplot " + b.series(x, "E_H");
    if (t.has_column("E_R")) text += ", \\\n     " + b.series(x, "E_R");
    scripts.push_back({"energy.gp", text + "\n"});
  }
  if (t.has_column("t") && t.has_column("sup")) {
    std::string source;
    const double slope = summary_exponent(records, t, "t", "sup", source);
    std::ostringstream os;
    os << b.header("on-diagonal heat kernel decay", "kernel.png") << "set logscale xy\n"
       << "set xlabel 't'\nset ylabel 'sup u'\n"
       << "set label 1 sprintf('fitted slope = %.4f (" << source << ")', " << format_number(slope)
       << ") at graph 0.05, graph 0.1\n"
       << "plot " << b.series("t", "sup", "linespoints") << "\n";
    scripts.push_back({"kernel.gp", os.str()});
  }
  if (t.has_column("delta") && t.has_column("volume")) {
    std::string source;
    const double slope = summary_exponent(records, t, "delta", "volume", source);
    std::ostringstream os;
    os << b.header("CC ball volume", "cc_ball.png") << "set logscale xy\n"
       << "set xlabel 'delta'\nset ylabel 'volume'\n"
       << "set label 1 sprintf('fitted slope = %.4f (" << source << ")', " << format_number(slope)
       << ") at graph 0.05, graph 0.9\n"
       << "plot " << b.series("delta", "volume", "linespoints") << "\n";
    scripts.push_back({"cc_ball.gp", os.str()});
  }
  if (t.has_column("t") && t.has_column("distance")) {
    scripts.push_back({"distance.gp", b.header("map distance vs t", "distance.png") +
                                          "set xlabel 't'\nplot " + b.series("t", "distance") + "\n"});
  }
  if (t.has_column("t_horizon") && t.has_column("max_ratio")) {
    scripts.push_back({"picard.gp", b.header("Picard contraction ratio", "picard.png") +
                                        "set logscale x\nset xlabel 't_horizon'\nplot " +
                                        b.series("t_horizon", "max_ratio", "linespoints") + "\n"});
  }
  return scripts;
}

}  // namespace

std::vector<fs::path> emit_plots(const fs::path& records, const fs::path& out_dir) {
  if (!fs::exists(records)) throw std::runtime_error("records file " + records.string() + " does not exist");
  const RecordTable table = read_csv(records);
  if (table.rows.empty()) throw std::runtime_error("records file " + records.string() + " has no data rows");
  const std::vector<Script> scripts = build(records, out_dir, table);
  if (scripts.empty()) throw std::runtime_error("records file " + records.string() + " has no plottable columns");

  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  try {
    for (const auto& s : scripts) {
      const fs::path path = out_dir / s.name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      written.push_back(path);
      out << s.text;
      if (!out) throw std::runtime_error("write failed for " + path.string());
    }
  } catch (...) {
    for (const auto& p : written) fs::remove(p);
    throw;
  }
  return written;
}

}  // namespace subrh
