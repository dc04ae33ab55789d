// automorph: command-line front end for the circle-map toolkit.
//
//   automorph rho|cf|partition|measure|kr|tongue|verify|sweep --config FILE [--out DIR]
//
// Exit codes: 0 success, 1 usage or config error, 2 rotation number not
// certified (Birkhoff fallback), 3 solver non-convergence, 4 acceptance failure.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "automorph/acceptance.hpp"
#include "automorph/automorph.hpp"
#include "automorph/config.hpp"

namespace am = automorph;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUncertified = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitVerifyFailed = 4;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

struct Run {
  am::ExperimentConfig cfg;
  std::string digest;
  fs::path out;

  std::ofstream open(const std::string& name) const {
    fs::create_directories(out);
    std::ofstream os(out / name);
    if (!os) throw am::InvalidArgument("cannot write " + (out / name).string());
    os << "# config_sha256=" << digest << '\n';
    os << std::setprecision(17);
    return os;
  }
  fs::path path(const std::string& name) const { return out / name; }
};

std::string num_tag(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

int cmd_rho(const Run& r) {
  const auto f = am::build_map(r.cfg);
  const auto rho = am::rotation_number(f, am::RotationOptions{r.cfg.rotation_tol, r.cfg.rotation_budget});
  std::cout << std::setprecision(17);
  std::cout << "rho = " << rho.value << " +- " << rho.error << (rho.certified ? " (certified)" : " (NOT certified)")
            << '\n';
  std::cout << "bracket = [" << am::to_string(rho.lower) << ", " << am::to_string(rho.upper) << "]\n";
  std::cout << "rational = " << (rho.rational ? "yes" : "no") << ", orbit length = " << rho.orbit_length << '\n';
  std::cout << "quotients = " << rho.expansion().str() << '\n';
  auto os = r.open("rho_ladder.csv");
  os << "n,p,q,value\n";
  for (std::size_t n = 0; n < rho.ladder.size(); ++n) {
    os << n << ',' << rho.ladder[n].p << ',' << rho.ladder[n].q << ',' << rho.ladder[n].value() << '\n';
  }
  return rho.certified ? kExitOk : kExitUncertified;
}

int cmd_cf(const Run& r) {
  am::ContinuedFraction cf;
  if (r.cfg.cf_value) {
    cf = am::cf_expand(*r.cfg.cf_value, r.cfg.cf_depth);
  } else if (r.cfg.alpha) {
    cf = am::ContinuedFraction(r.cfg.alpha->expanded(r.cfg.cf_depth));
  } else {
    throw am::InvalidArgument("cf needs cf_value or alpha in the config");
  }
  std::cout << "quotients = " << cf.str() << (cf.terminated() ? " (finite)" : "") << '\n';
  auto os = r.open("cf.csv");
  os << "n,k,p,q,value\n";
  const auto ladder = am::convergents(cf);
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    os << n << ',' << cf.quotient(n) << ',' << ladder[n].p << ',' << ladder[n].q << ',' << ladder[n].value() << '\n';
  }
  return kExitOk;
}

int cmd_partition(const Run& r) {
  const auto f = am::build_map(r.cfg);
  auto levels = r.cfg.partition_levels;
  if (levels.empty()) levels = {1, 2, 3, 4, 5};
  const int deepest = *std::max_element(levels.begin(), levels.end());
  const auto rho = am::rotation_to_depth(f, static_cast<std::size_t>(std::max(deepest, 0)) + 2, r.cfg.max_q);
  if (!rho.certified || rho.rational) throw am::InvalidArgument("partition needs a certified irrational rotation number");
  auto os = r.open("partition.csv");
  os << "level,index,left,right,length\n";
  std::cout << "level,q_n,q_n+1,intervals,real_bounds_ratio,max_return_derivative\n" << std::setprecision(10);
  for (int n : levels) {
    const auto P = am::build_partition(f, n, rho);
    for (std::size_t i = 0; i < P.intervals.size(); ++i) {
      const auto& I = P.intervals[i];
      os << n << ',' << i << ',' << I.left << ',' << I.right() << ',' << I.length << '\n';
    }
    std::cout << n << ',' << P.qn() << ',' << P.qn1() << ',' << P.intervals.size() << ','
              << am::real_bounds_ratio(P) << ',' << am::max_return_derivative(f, P.qn()) << '\n';
  }
  return kExitOk;
}

int cmd_measure(const Run& r) {
  if (r.cfg.exponents.empty()) throw am::InvalidArgument("measure: the exponent list is empty");
  const auto f = am::build_map(r.cfg);
  auto report = r.open("measure_report.csv");
  report << "s,N,iterations,residual,lambda,kr_gap,max_atom,file\n";
  int status = kExitOk;
  for (double s : r.cfg.exponents) {
    try {
      const auto sol = am::solve_s_measure(f, s, r.cfg.grid, r.cfg.solve_options());
      const std::string stem = "measure_s" + num_tag(s);
      {
        auto os = r.open(stem + ".csv");
        am::write_measure_csv(os, sol.measure);
      }
      am::save_measure_binary(r.path(stem + ".amu").string(), sol.measure);
      report << s << ',' << r.cfg.grid << ',' << sol.iterations << ',' << sol.residual << ',' << sol.lambda << ','
             << sol.kr_gap << ',' << am::max_atom(sol.measure) << ',' << stem << ".csv\n";
      std::cout << "s=" << s << ": iterations=" << sol.iterations << " residual=" << sol.residual
                << " lambda=" << sol.lambda << '\n';
    } catch (const am::ConvergenceError& e) {
      std::cerr << "s=" << s << ": " << e.what() << '\n';
      report << s << ',' << r.cfg.grid << ",,,,,,no convergence\n";
      status = kExitNoConvergence;
    }
  }
  return status;
}

int cmd_kr(const Run& r) {
  if (r.cfg.kr_inputs.size() != 2) throw am::InvalidArgument("kr needs exactly two kr_inputs");
  const auto a = am::load_measure(r.cfg.kr_inputs[0]);
  const auto b = am::load_measure(r.cfg.kr_inputs[1]);
  std::cout << std::setprecision(17) << am::kr_distance(a, b) << '\n';
  return kExitOk;
}

int cmd_tongue(const Run& r) {
  if (!r.cfg.alpha) throw am::InvalidArgument("tongue needs alpha as quotients");
  if (r.cfg.nu_grid.empty()) throw am::InvalidArgument("tongue needs a nu_grid");
  const auto pts = am::trace_tongue(r.cfg.family, *r.cfg.alpha, r.cfg.nu_grid, r.cfg.tongue_options());
  auto os = r.open("tongue.csv");
  os << "nu,a,da_dnu,fd_da_dnu,bisection_width,measure_residual,iterations,error\n";
  int status = kExitOk;
  for (const auto& p : pts) {
    os << p.nu << ',' << p.a << ',' << p.derivative << ',' << p.fd_derivative << ',' << p.width << ','
       << p.residual << ',' << p.iterations << ',' << p.error << '\n';
    if (!p.ok) {
      std::cerr << "nu=" << p.nu << ": " << p.error << '\n';
      status = kExitNoConvergence;
    }
  }
  std::cout << "wrote " << pts.size() << " tongue points to " << r.path("tongue.csv").string() << '\n';
  return status;
}

int cmd_sweep(const Run& r) {
  if (!r.cfg.alpha) throw am::InvalidArgument("sweep needs alpha as quotients");
  if (r.cfg.nu_grid.empty() || r.cfg.exponents.empty()) throw am::InvalidArgument("sweep needs nu_grid and exponents");
  struct Row {
    double nu = 0.0, s = 0.0, a = 0.0, residual = 0.0, lambda = 0.0, atom = 0.0, kr_leb = 0.0;
    int iterations = 0;
    std::string error;
  };
  const auto& nus = r.cfg.nu_grid;
  const auto& ss = r.cfg.exponents;
  std::vector<Row> rows(nus.size() * ss.size());
  std::atomic<std::size_t> next{0};
  const auto topt = r.cfg.tongue_options();
  auto work = [&] {
    for (std::size_t i = next++; i < nus.size(); i = next++) {
      double a = std::numeric_limits<double>::quiet_NaN();
      std::string err;
      try {
        a = am::solve_tongue(r.cfg.family, *r.cfg.alpha, nus[i], topt).a;
      } catch (const am::Error& e) {
        err = e.what();
      }
      for (std::size_t j = 0; j < ss.size(); ++j) {
        Row& row = rows[i * ss.size() + j];
        row.nu = nus[i];
        row.s = ss[j];
        row.a = a;
        row.error = err;
        if (!err.empty()) continue;
        try {
          auto so = r.cfg.solve_options();
          so.assume_irrational = true;
          const auto sol = am::solve_s_measure(r.cfg.family.at(a, nus[i]), ss[j], r.cfg.grid, so);
          row.residual = sol.residual;
          row.lambda = sol.lambda;
          row.iterations = sol.iterations;
          row.atom = am::max_atom(sol.measure);
          row.kr_leb = am::kr_distance(sol.measure, am::lebesgue(r.cfg.grid));
        } catch (const am::Error& e) {
          row.error = e.what();
        }
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(r.cfg.workers, static_cast<unsigned>(nus.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(work);
  }
  auto os = r.open("sweep.csv");
  os << "nu,s,a,iterations,residual,lambda,max_atom,kr_to_lebesgue,error\n";
  int status = kExitOk;
  for (const auto& row : rows) {
    os << row.nu << ',' << row.s << ',' << row.a << ',' << row.iterations << ',' << row.residual << ','
       << row.lambda << ',' << row.atom << ',' << row.kr_leb << ',' << row.error << '\n';
    if (!row.error.empty()) status = kExitNoConvergence;
  }
  std::cout << "wrote " << rows.size() << " sweep rows to " << r.path("sweep.csv").string() << '\n';
  return status;
}

int cmd_verify(const Run& r, const std::vector<std::string>& select_list) {
  namespace acc = am::acceptance;
  std::set<std::string> select;
  for (const auto& item : select_list) {
    std::stringstream ss(item);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (!id.empty()) select.insert(id);
    }
  }
  for (const auto& id : select) {
    const bool known = std::any_of(acc::criteria().begin(), acc::criteria().end(),
                                   [&](const acc::Criterion& c) { return c.id == id; });
    if (!known) throw am::InvalidArgument("verify: unknown criterion '" + id + "'");
  }
  acc::Context ctx(r.cfg.baselines);
  int failed = 0;
  acc::run(ctx, select, [&](const acc::Result& res) {
    std::cout << acc::format(res) << std::endl;
    if (res.status == acc::Status::Fail) ++failed;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all selected criteria passed"))
            << '\n';
  return failed ? kExitVerifyFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automorphic s-measures, rotation numbers and Arnold tongues of circle maps"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path, out_dir;
  unsigned workers = 0;
  std::vector<std::string> select;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--workers", workers, "worker threads (overrides workers)");
  app.add_option("--select", select, "criteria to run (verify), comma separated")->delimiter(',');

  const std::vector<std::pair<std::string, std::string>> commands{
      {"rho", "certified rotation number and convergent ladder"},
      {"cf", "continued fraction quotients and convergents"},
      {"partition", "dynamical partitions, real-bounds ratios, return derivatives"},
      {"measure", "solve s-measures for every exponent"},
      {"kr", "Kantorovich-Rubinstein distance between two measure files"},
      {"tongue", "trace an irrational Arnold tongue with derivatives"},
      {"verify", "run the acceptance criteria"},
      {"sweep", "s-measures over a nu grid on the tongue"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Run r;
    if (!config_path.empty()) {
      r.cfg = am::load_config(config_path);
    } else if (cmd != "verify") {
      throw am::InvalidArgument(cmd + " needs --config");
    }
    r.digest = sha256_hex(r.cfg.source.dump());
    if (!out_dir.empty()) r.cfg.output_dir = out_dir;
    if (workers > 0) r.cfg.workers = workers;
    r.out = r.cfg.output_dir;

    if (cmd == "rho") return cmd_rho(r);
    if (cmd == "cf") return cmd_cf(r);
    if (cmd == "partition") return cmd_partition(r);
    if (cmd == "measure") return cmd_measure(r);
    if (cmd == "kr") return cmd_kr(r);
    if (cmd == "tongue") return cmd_tongue(r);
    if (cmd == "sweep") return cmd_sweep(r);
    return cmd_verify(r, select);
  } catch (const am::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
