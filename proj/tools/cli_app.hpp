// Command-line front end. Kept in a header so the test suite can drive it
// in-process with its own streams.

#pragma once

#include "mueller/mueller.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mueller::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPreMuellerOnly = 2;
inline constexpr int kExitNotPhysical = 2;
inline constexpr int kExitNonPreMueller = 3;

struct GlobalOptions {
  double tol = kDefaultTol;
  int grid = 181;
  std::string precision = "6";

  int digits() const {
    if (precision == "full") return io::kFullPrecision;
    const int p = std::stoi(precision);
    if (p < 1 || p > io::kFullPrecision) throw CLI::ValidationError("--precision", "must be 1..17 or 'full'");
    return p;
  }

  ConeScanConfig cone() const {
    auto c = ConeScanConfig::with_grid(grid);
    c.tol = tol;
    return c;
  }
};

struct NamedMatrix {
  std::string id;
  MuellerMatrix m;
};

namespace detail {

inline std::string snap(double v, double scale, int digits) {
  if (std::abs(v) <= 1e-12 * std::max(1.0, scale)) v = 0.0;
  return io::format_real(v, digits);
}

inline bool slurp(const std::string& path, std::istream& stdin_stream, std::string& text, std::ostream& err) {
  if (path == "-") {
    std::ostringstream ss;
    ss << stdin_stream.rdbuf();
    text = ss.str();
    return true;
  }
  std::ifstream f(path);
  if (!f) {
    err << "error: cannot open '" << path << "'\n";
    return false;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  text = ss.str();
  return true;
}

/// Loads a single Mueller file or a batch CSV. Unparseable batch rows are
/// reported and skipped; returns false (usage error) when nothing usable
/// remains.
inline bool load_matrices(const std::string& path, std::istream& stdin_stream, std::vector<NamedMatrix>& out,
                          bool& batch, std::ostream& err) {
  std::string text;
  if (!slurp(path, stdin_stream, text, err)) return false;
  batch = io::looks_like_batch(text);
  std::istringstream in(text);
  if (!batch) {
    try {
      out.push_back({path, io::read_mueller(in)});
    } catch (const io::ParseError& e) {
      err << "error: " << path << ": " << e.what() << '\n';
      return false;
    }
    return true;
  }
  const auto rows = io::read_batch(in);
  int failed = 0;
  for (const auto& r : rows) {
    if (r.matrix) {
      out.push_back({r.id, *r.matrix});
    } else {
      ++failed;
      err << "error: " << path << ": line " << r.line << ": " << r.error << '\n';
    }
  }
  if (failed > 0) err << "skipped " << failed << " of " << rows.size() << " rows\n";
  if (out.empty()) {
    err << "error: " << path << ": no usable rows\n";
    return false;
  }
  return true;
}

// Order-preserving parallel map over the batch.
template <typename R>
std::vector<R> parallel_map(const std::vector<NamedMatrix>& items, const std::function<R(const MuellerMatrix&)>& fn) {
  std::vector<R> results(items.size());
  const size_t workers = std::max<size_t>(1, std::min<size_t>(std::thread::hardware_concurrency(), items.size()));
  if (workers == 1) {
    for (size_t k = 0; k < items.size(); ++k) results[k] = fn(items[k].m);
    return results;
  }
  std::vector<std::future<void>> jobs;
  for (size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (size_t k = w; k < items.size(); k += workers) results[k] = fn(items[k].m);
    }));
  }
  for (auto& j : jobs) j.get();
  return results;
}

}  // namespace detail

inline int cmd_classify(const GlobalOptions& g, const std::string& input, const std::string& format,
                        std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<NamedMatrix> items;
  bool batch = false;
  if (!detail::load_matrices(input, in, items, batch, err)) return kExitUsage;
  const int digits = g.digits();
  const auto cfg = g.cone();
  const auto results = detail::parallel_map<ClassificationResult>(
      items, [&](const MuellerMatrix& m) { return classify(m, cfg); });

  if (format == "csv") out << "id,kind,mueller_jones,min_h_eig,cone_min,min_intensity\n";
  int status = kExitOk;
  for (size_t k = 0; k < items.size(); ++k) {
    const auto& r = results[k];
    const double mscale = items[k].m.m.squaredNorm();
    const std::string eig = detail::snap(r.min_h_eigenvalue, std::abs(r.h_trace), digits);
    const std::string cmin = detail::snap(r.cone_min_value, mscale, digits);
    const std::string imin = detail::snap(r.min_intensity, std::sqrt(mscale), digits);
    const char* mj = r.is_mueller_jones ? "true" : "false";
    if (format == "csv") {
      out << items[k].id << ',' << to_string(r.kind) << ',' << mj << ',' << eig << ',' << cmin << ','
          << imin << '\n';
    } else {
      if (batch) out << items[k].id << ": ";
      out << to_string(r.kind) << ", mueller_jones=" << mj << ", min_h_eig=" << eig << ", cone_min=" << cmin
          << ", min_intensity=" << imin << '\n';
    }
    if (r.kind == MuellerKind::NonPreMueller)
      status = kExitNonPreMueller;
    else if (r.kind == MuellerKind::PreMuellerOnly && status == kExitOk)
      status = kExitPreMuellerOnly;
  }
  return status;
}

inline int cmd_decompose(const GlobalOptions& g, const std::string& input, std::istream& in, std::ostream& out,
                         std::ostream& err) {
  std::vector<NamedMatrix> items;
  bool batch = false;
  if (!detail::load_matrices(input, in, items, batch, err)) return kExitUsage;
  const int digits = g.digits();
  int status = kExitOk;
  for (const auto& item : items) {
    if (batch) out << "# " << item.id << '\n';
    try {
      const auto dec = decompose_convex(item.m, g.tol);
      out << "terms=" << dec.terms.size() << '\n';
      for (size_t k = 0; k < dec.terms.size(); ++k) {
        out << "term " << (k + 1) << " weight=" << io::format_real(dec.terms[k].weight, digits) << '\n';
        io::write_jones(out, dec.terms[k].jones, digits);
      }
      out << "residual=" << io::format_real(dec.residual(item.m), 3) << '\n';
    } catch (const NotPhysical& e) {
      const double tr = h_from_mueller(item.m).trace();
      out << "not physical: min_h_eig=" << detail::snap(e.min_eigenvalue(), std::abs(tr), digits) << '\n';
      status = kExitNotPhysical;
    } catch (const InvalidInput& e) {
      out << "no decomposition: " << e.what() << '\n';
    }
  }
  return status;
}

inline int cmd_witness(const GlobalOptions& g, const std::string& input, const std::string& dump_path,
                       std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<NamedMatrix> items;
  bool batch = false;
  if (!detail::load_matrices(input, in, items, batch, err)) return kExitUsage;
  const int digits = g.digits();

  std::ofstream dump;
  if (!dump_path.empty()) {
    dump.open(dump_path);
    if (!dump) {
      err << "error: cannot write '" << dump_path << "'\n";
      return kExitUsage;
    }
  }

  int status = kExitOk;
  for (const auto& item : items) {
    const auto w = witness_negativity(item.m);
    const double tr = w.output_state.trace();
    const bool ok = tr >= 0.0 && w.min_eigenvalue >= -g.tol * tr;
    if (batch) out << item.id << ": ";
    out << "witness_min_eig=" << detail::snap(w.min_eigenvalue, std::abs(tr), digits)
        << ", verdict=" << (ok ? "physical" : "unphysical") << '\n';
    if (!ok) status = kExitNotPhysical;
    if (dump.is_open()) {
      if (batch) dump << "# " << item.id << '\n';
      io::write_complex_matrix(dump, w.output_state.phi, digits);
    }
  }
  return status;
}

inline int cmd_diag_scan(const GlobalOptions& g, int resolution, double extent, const std::string& out_path,
                         std::ostream& out, std::ostream& err) {
  std::vector<DiagonalScanPoint> pts;
  try {
    pts = diag_region_scan(resolution, extent, g.tol);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const int digits = g.digits();
  std::ofstream file;
  std::ostream* sink = &out;
  if (out_path != "-") {
    file.open(out_path);
    if (!file) {
      err << "error: cannot write '" << out_path << "'\n";
      return kExitUsage;
    }
    sink = &file;
  }
  *sink << "d1,d2,d3,region\n";
  size_t in_cube = 0, tetra = 0;
  for (const auto& p : pts) {
    *sink << io::format_real(p.d.d1, digits) << ',' << io::format_real(p.d.d2, digits) << ','
          << io::format_real(p.d.d3, digits) << ',' << to_string(p.region) << '\n';
    if (p.region != DiagonalRegion::OutsideCube) ++in_cube;
    if (p.region == DiagonalRegion::Tetrahedron) ++tetra;
  }
  if (out_path != "-") {
    out << "rows=" << pts.size() << " in_cube=" << in_cube << " tetrahedron=" << tetra;
    if (in_cube > 0) out << " tetrahedron_fraction=" << io::format_real(double(tetra) / in_cube, digits);
    out << '\n';
  }
  return kExitOk;
}

inline int cmd_convert(const GlobalOptions& g, const std::string& kind, const std::string& input,
                       std::istream& in, std::ostream& out, std::ostream& err) {
  std::string text;
  if (!detail::slurp(input, in, text, err)) return kExitUsage;
  std::istringstream ss(text);
  const int digits = g.digits();
  try {
    if (kind == "stokes") {
      io::write_complex_matrix(out, coherency_from_stokes(io::read_stokes(ss)).matrix(), digits);
    } else if (kind == "coherency") {
      io::write_stokes(out, stokes_from_coherency(io::read_complex2x2(ss)), digits);
    } else if (kind == "jones-to-mueller") {
      io::write_mueller(out, mueller_jones_from_jones(io::read_jones(ss)), digits);
    } else {
      err << "error: unknown conversion '" << kind << "'\n";
      return kExitUsage;
    }
  } catch (const io::ParseError& e) {
    err << "error: " << input << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << input << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

/// args excludes the program name.
inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mueller matrix physicality checks, Jones decompositions and entanglement witness", "mueller"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--tol", g.tol, "relative tolerance for all classifications")->check(CLI::PositiveNumber);
  app.add_option("--grid", g.grid, "cone-scan resolution (theta steps; phi uses 2n-1)")
      ->check(CLI::Range(3, 10001));
  app.add_option("--precision", g.precision, "significant digits (1..17) or 'full'");

  std::string input, format = "text", dump_path, out_path, kind;
  int resolution = 0;
  double extent = 1.1;

  auto* classify_cmd = app.add_subcommand("classify", "classify matrices as physical, pre-Mueller only, or neither");
  classify_cmd->add_option("input", input, "Mueller file or batch CSV ('-' for stdin)")->required();
  classify_cmd->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  auto* decompose_cmd = app.add_subcommand("decompose", "split a physical matrix into Jones systems");
  decompose_cmd->add_option("input", input, "Mueller file or batch CSV")->required();

  auto* witness_cmd = app.add_subcommand("witness", "apply the matrix to the entangled two-mode beam");
  witness_cmd->add_option("input", input, "Mueller file or batch CSV")->required();
  witness_cmd->add_option("--dump-state", dump_path, "write the output BCP matrix here");

  auto* scan_cmd = app.add_subcommand("diag-scan", "region map of diag(1, d1, d2, d3) as CSV");
  scan_cmd->add_option("--resolution", resolution, "points per axis")->required();
  scan_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)")->required();
  scan_cmd->add_option("--extent", extent, "half-width of the scanned box");

  auto* convert_cmd = app.add_subcommand("convert", "convert between Stokes, coherency and Mueller forms");
  convert_cmd->add_option("kind", kind, "stokes | coherency | jones-to-mueller")
      ->required()
      ->check(CLI::IsMember({"stokes", "coherency", "jones-to-mueller"}));
  convert_cmd->add_option("input", input, "input file ('-' for stdin)")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
    (void)g.digits();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: bad --precision: " << e.what() << '\n';
    return kExitUsage;
  }

  if (classify_cmd->parsed()) return cmd_classify(g, input, format, in, out, err);
  if (decompose_cmd->parsed()) return cmd_decompose(g, input, in, out, err);
  if (witness_cmd->parsed()) return cmd_witness(g, input, dump_path, in, out, err);
  if (scan_cmd->parsed()) return cmd_diag_scan(g, resolution, extent, out_path, out, err);
  if (convert_cmd->parsed()) return cmd_convert(g, kind, input, in, out, err);
  return kExitUsage;
}

}  // namespace mueller::cli
