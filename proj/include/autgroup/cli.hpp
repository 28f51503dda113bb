#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "autgroup/errors.hpp"
#include "autgroup/experiments.hpp"
#include "autgroup/mealy.hpp"
#include "autgroup/theory.hpp"

// Command-line front end. Exit codes: 0 success, 2 parse or usage error,
// 3 precondition violation, 4 failed internal verification.

namespace autgroup::cli {

enum ExitCode : int { Ok = 0, Usage = 2, Precondition = 3, Verification = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(std::string const &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MealyAutomaton load(std::string const &path) {
  try {
    return parse_automaton(read_file(path));
  } catch (ParseError const &e) {
    throw ParseError(path + ": " + e.what());
  }
}

} // namespace detail

inline int run(int argc, char const *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Groups generated by cycle-without-exit Mealy automata", "autgroup"};
  app.require_subcommand(1, 1);

  std::string format = "text";
  unsigned jobs = 1;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1000;
  std::size_t states = 2;
  std::size_t letters = 6;
  bool summary = false;

  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--jobs", jobs, "Worker threads for experiments")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", out_path, "Write output to this file instead of stdout");
  app.add_option("--seed", seed, "64-bit decimal seed (mandatory for sampling)");
  app.add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  app.add_option("--states", states, "Number of states")->check(CLI::PositiveNumber);
  app.add_option("--letters", letters, "Alphabet size k")->check(CLI::PositiveNumber);

  std::string file;
  auto *classify_cmd = app.add_subcommand("classify", "Classify an automaton file");
  classify_cmd->add_option("file", file)->required();
  auto *order_cmd = app.add_subcommand("order", "Verified order of the generated group");
  order_cmd->add_option("file", file)->required();
  auto *witness_cmd = app.add_subcommand("witness", "Prime-cycle witness for a cyclic automaton");
  witness_cmd->add_option("file", file)->required();

  auto *sample_cmd = app.add_subcommand("sample", "Random cyclic automata distribution");
  sample_cmd->add_flag("--summary", summary, "CSV: one row per outcome instead of per trial");
  auto *enumerate_cmd = app.add_subcommand("enumerate", "Exact distribution over all pairs, k <= 6");
  auto *stats_cmd = app.add_subcommand("order-stats", "Probability that two orders agree");
  auto *inverse_cmd = app.add_subcommand("inverse-pairs", "Groups of (s,s^-1),(t,t^-1) unions");

  std::vector<std::size_t> sizes;
  auto *union_cmd = app.add_subcommand("union-bound", "Sign-group exponent for cycle sizes");
  union_cmd->add_option("sizes", sizes)->required()->check(CLI::PositiveNumber);
  std::size_t dixon_k = 0;
  auto *dixon_cmd = app.add_subcommand("dixon-ref", "Truncated generation-probability series");
  dixon_cmd->add_option("k", dixon_k)->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));

  for (auto *sub : app.get_subcommands({}))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &) {
    out << app.help();
    return Ok;
  } catch (CLI::CallForAllHelp const &) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (CLI::ParseError const &e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  }

  bool const csv = format == "csv";
  auto need_seed = [&]() -> std::uint64_t {
    if (!seed)
      throw UsageError("--seed is required for sampling subcommands");
    return *seed;
  };

  try {
    std::ostringstream buf;
    if (*classify_cmd) {
      auto const rep = classify(detail::load(file));
      if (csv)
        buf << report_csv_header() << '\n' << report_csv_row(rep) << '\n';
      else
        buf << report_text(rep);
    } else if (*order_cmd) {
      auto const a = detail::load(file);
      auto const eg = generated_group(a);
      auto const o = group_order(eg.group);
      if (csv)
        buf << "order\n" << o << '\n';
      else
        buf << "order: " << o << '\n';
    } else if (*witness_cmd) {
      auto const a = detail::load(file);
      require_group_semantics(a);
      if (!std::holds_alternative<Cyclic>(classify_structure(a)))
        throw PreconditionError("witness needs a cyclic automaton");
      auto const perms = cycle_components(a).front();
      auto const generated = recognize_generated(perms);
      CirculantGroup const cg(perms);
      Witness w;
      if (cg.n == 2) {
        try {
          w = witness_prime_cycle_2(cg, generated);
        } catch (EdgeCase const &) {
          w = kernel_witness(cg, 1);
        }
      } else {
        w = witness_prime_cycle_n(cg, generated);
      }
      if (csv)
        buf << "coordinate,prime,cycle,route\n"
            << w.coordinate << ',' << w.prime << ",\"" << format_cycles(w.cycle) << "\","
            << w.route << '\n';
      else
        buf << "witness_coordinate: " << w.coordinate << '\n'
            << "witness_prime: " << w.prime << '\n'
            << "witness_cycle: " << format_cycles(w.cycle) << '\n'
            << "witness_route: " << w.route << '\n'
            << "membership: verified\n";
    } else if (*sample_cmd) {
      TrialConfig cfg;
      cfg.n = states;
      cfg.k = letters;
      cfg.trials = trials;
      cfg.seed = need_seed();
      cfg.jobs = jobs;
      auto const rep = sample_cyclic_distribution(cfg);
      if (csv)
        buf << (summary ? summary_csv(rep) : sample_csv(rep));
      else
        buf << distribution_text(rep);
    } else if (*enumerate_cmd) {
      if (states != 2)
        throw SizeGuard("exact enumeration is limited to --states 2");
      auto const rep = exact_enumeration_2(letters, jobs);
      buf << (csv ? summary_csv(rep) : distribution_text(rep));
    } else if (*stats_cmd) {
      auto const r = same_order_probability(letters, trials, need_seed(), jobs);
      buf << (csv ? order_stats_csv(r) : order_stats_text(r));
    } else if (*inverse_cmd) {
      auto const r = inverse_pair_experiment(letters, trials, need_seed(), jobs);
      if (csv)
        buf << summary_csv(r.distribution);
      else
        buf << distribution_text(r.distribution) << "generating_pairs: " << r.generating << '\n'
            << "conditional_match_rate: " << format_double(r.conditional_match_rate()) << '\n';
    } else if (*union_cmd) {
      auto const u = union_exponent(sizes);
      std::string joined;
      for (auto s : sizes)
        joined += (joined.empty() ? "" : ";") + std::to_string(s);
      if (csv)
        buf << "sizes,u\n" << joined << ',' << u << '\n';
      else
        buf << "u = " << u << '\n';
    } else if (*dixon_cmd) {
      double const ref = dixon_reference(dixon_k);
      std::optional<DixonReport> measured;
      if (seed)
        measured = dixon_frequency(dixon_k, trials, *seed, jobs);
      if (csv) {
        buf << "k,reference,trials,frequency\n" << dixon_k << ',' << format_double(ref) << ',';
        if (measured)
          buf << measured->trials << ',' << format_double(measured->frequency);
        else
          buf << ',';
        buf << '\n';
      } else {
        buf << "k: " << dixon_k << '\n' << "reference: " << format_double(ref) << '\n';
        if (measured)
          buf << "trials: " << measured->trials << '\n'
              << "measured_frequency: " << format_double(measured->frequency) << '\n';
      }
    }

    if (out_path.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f)
        throw UsageError("cannot write '" + out_path + "'");
      f << buf.str();
    }
    return Ok;
  } catch (UsageError const &e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  } catch (ParseError const &e) {
    err << "parse error: " << e.what() << '\n';
    return Usage;
  } catch (PreconditionError const &e) {
    err << "precondition violated: " << e.what() << '\n';
    return Precondition;
  } catch (VerificationError const &e) {
    err << "verification failed: " << e.what() << '\n';
    return Verification;
  }
}

} // namespace autgroup::cli
