#include "hubkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hubkit/core.hpp"
#include "hubkit/diagnostics.hpp"
#include "hubkit/error.hpp"
#include "hubkit/io.hpp"
#include "hubkit/retrieval.hpp"
#include "hubkit/scaling.hpp"
#include "hubkit/sinkhorn.hpp"
#include "hubkit/synth.hpp"
#include "hubkit/variants.hpp"

namespace hubkit::cli {
namespace {

namespace fs = std::filesystem;

// Raised for flag combinations CLI11 cannot express; reported as a usage error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kMethods = {"none", "is",  "dis", "dualis", "sn",
                                           "dbsn", "otn", "l2n", "hn"};

struct NormOptions {
  std::string method = "none";
  std::optional<double> tau;
  double tau1 = 0.02;
  double tau2 = 0.02;
  int iters = 10;
  Index k = 1;
  bool prob = false;
  std::string qbank_sim;
  std::string tbank_sim;
  std::string bank_bank_sim;
};

double tau_or_default(const NormOptions& o) {
  if (o.tau) return *o.tau;
  return (o.method == "sn" || o.method == "dbsn") ? 0.01 : 0.02;
}

void add_norm_flags(CLI::App* cmd, NormOptions& o) {
  cmd->add_option("--method", o.method, "normalization method")->check(CLI::IsMember(kMethods));
  cmd->add_option("--tau", o.tau, "temperature (IS/DIS 0.02, SN/DBSN 0.01)")->check(CLI::PositiveNumber);
  cmd->add_option("--tau1", o.tau1, "DualIS query-bank temperature")->check(CLI::PositiveNumber);
  cmd->add_option("--tau2", o.tau2, "DualIS target-bank temperature")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", o.iters, "Sinkhorn iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--k", o.k, "DIS neighbourhood size")->check(CLI::PositiveNumber);
  cmd->add_flag("--prob", o.prob, "write IS/DualIS/SN as probabilities instead of log-scores");
  cmd->add_option("--qbank-sim", o.qbank_sim, "SIM1 of query bank x targets");
  cmd->add_option("--tbank-sim", o.tbank_sim, "SIM1 of target bank x targets");
  cmd->add_option("--bank-bank-sim", o.bank_bank_sim, "SIM1 of query bank x target bank");
}

void require(bool present, const std::string& flag, const std::string& method) {
  if (!present) throw UsageError(flag + " is required for --method " + method);
}

void validate_norm(const NormOptions& o) {
  const std::string& m = o.method;
  if (m == "dualis") {
    require(!o.qbank_sim.empty(), "--qbank-sim", m);
    require(!o.tbank_sim.empty(), "--tbank-sim", m);
  }
  if (m == "dbsn") {
    require(!o.qbank_sim.empty(), "--qbank-sim", m);
    require(!o.bank_bank_sim.empty(), "--bank-bank-sim", m);
  }
  if (o.prob) {
    const bool literal_ok = m == "is" || m == "dualis" || (m == "sn" && o.qbank_sim.empty());
    if (!literal_ok) throw UsageError("--prob is not supported for --method " + m);
  }
}

struct Normalized {
  SimilarityMatrix scores;
  std::vector<std::pair<std::string, double>> params;
};

Normalized normalize_scores(const SimilarityMatrix& s, const NormOptions& o) {
  const std::string& m = o.method;
  const double tau = tau_or_default(o);
  const auto bank_or_s = [&](const std::string& path) {
    return path.empty() ? s : io::read_similarity(path);
  };
  if (m == "none") return {s, {}};
  if (m == "is") {
    const SimilarityMatrix bank = bank_or_s(o.qbank_sim);
    SimilarityMatrix additive = apply_hubness(s, is_hubness(bank, tau));
    if (o.prob) {
      Matrix p = (additive.values().array() / tau).exp().matrix();
      return {SimilarityMatrix(std::move(p)), {{"tau", tau}}};
    }
    return {std::move(additive), {{"tau", tau}}};
  }
  if (m == "dis") {
    const SimilarityMatrix bank = bank_or_s(o.qbank_sim);
    return {dynamic_inverted_softmax(s, bank, DisConfig{o.k}, tau),
            {{"tau", tau}, {"k", static_cast<double>(o.k)}}};
  }
  if (m == "dualis") {
    const DualIsConfig cfg{o.tau1, o.tau2};
    const SimilarityMatrix qb = io::read_similarity(o.qbank_sim);
    const SimilarityMatrix tb = io::read_similarity(o.tbank_sim);
    std::vector<std::pair<std::string, double>> params = {{"tau1", o.tau1}, {"tau2", o.tau2}};
    if (o.prob) return {dual_inverted_softmax(s, qb, tb, cfg), params};
    return {apply_hubness(s, dual_is_hubness(qb, tb, cfg)), params};
  }
  const SinkhornConfig scfg{tau, o.iters};
  const std::vector<std::pair<std::string, double>> sk_params = {
      {"tau", tau}, {"iters", static_cast<double>(o.iters)}};
  if (m == "sn") {
    if (!o.qbank_sim.empty()) {
      const SimilarityMatrix bank = io::read_similarity(o.qbank_sim);
      return {apply_hubness(s, estimate_target_hubness(bank, scfg)), sk_params};
    }
    if (o.prob) {
      TransportPlan plan = sinkhorn(s, Marginals::uniform(s.rows(), s.cols()), scfg);
      return {SimilarityMatrix(std::move(plan.pi)), sk_params};
    }
    return {sn_normalize(s, scfg), sk_params};
  }
  if (m == "dbsn") {
    const SimilarityMatrix qb = io::read_similarity(o.qbank_sim);
    const SimilarityMatrix bb = io::read_similarity(o.bank_bank_sim);
    return {dbsn(s, qb, bb, scfg), sk_params};
  }
  const Marginals marg = Marginals::uniform(s.rows(), s.cols());
  if (m == "otn") {
    TransportPlan plan = otn(s, marg);
    return {SimilarityMatrix(std::move(plan.pi)), {}};
  }
  if (m == "l2n") {
    L2nResult res = l2n(s, marg);
    return {SimilarityMatrix(std::move(res.plan.pi)), {}};
  }
  return {hn_scores(s, hn(s), HnRanking::assigned_first), {}};
}

std::vector<Index> parse_ks(const std::string& text) {
  std::vector<Index> ks;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t used = 0;
      const long long k = std::stoll(field, &used);
      if (used != field.size() || k < 1) throw std::invalid_argument(field);
      ks.push_back(static_cast<Index>(k));
    } catch (const std::logic_error&) {
      throw UsageError("--Ks: bad entry '" + field + "'");
    }
  }
  if (ks.empty()) throw UsageError("--Ks: empty list");
  return ks;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

double skew_at(const SimilarityMatrix& s, Index k) {
  return skewness(k_occurrence(row_argsort_desc(s), k)).value;
}

double r_at_1(const SimilarityMatrix& s, const GroundTruth& gt) {
  return evaluate(s, gt, {1}).r_at.at(1);
}

Matrix head_rows(const Matrix& m, Index rows) { return m.topRows(rows); }

void set_threads_from_env() {
  if (const char* env = std::getenv("HUBKIT_THREADS")) {
    char* end = nullptr;
    const long threads = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && threads >= 0) set_max_threads(static_cast<int>(threads));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  set_threads_from_env();
  CLI::App app{"hubkit: hubness reduction for cross-modal retrieval", "hubkit"};
  app.require_subcommand(1);

  SynthConfig synth;
  std::string synth_dir;
  bool synth_banks = false;
  auto* synth_cmd = app.add_subcommand("synth", "generate paired embeddings and optional banks");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--pairs", synth.n_pairs, "number of query/target pairs")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dim", synth.dim, "embedding dimension")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.noise_sigma, "per-coordinate query noise")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--gap", synth.gap_magnitude, "modality gap length")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--hub-fraction", synth.hub_fraction)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--hub-strength", synth.hub_strength)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--bank-shift", synth.bank_shift)->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--bank-pairs", synth.bank_pairs, "bank size (default: --pairs)")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_flag("--banks", synth_banks, "also write qbank.emb and tbank.emb");
  synth_cmd->add_option("--out", synth_dir, "output directory")->required();

  std::string sim_queries, sim_targets, sim_out;
  auto* sim_cmd = app.add_subcommand("sim", "cosine similarity between two EMB1 files");
  sim_cmd->add_option("--queries", sim_queries)->required();
  sim_cmd->add_option("--targets", sim_targets)->required();
  sim_cmd->add_option("--out", sim_out)->required();

  NormOptions norm;
  std::string norm_in, norm_out;
  auto* norm_cmd = app.add_subcommand("normalize", "normalize a SIM1 matrix");
  norm_cmd->add_option("--sim", norm_in)->required();
  norm_cmd->add_option("--out", norm_out)->required();
  add_norm_flags(norm_cmd, norm);
  norm_cmd->get_option("--method")->required();

  NormOptions eval_norm;
  std::string eval_sim, eval_truth, eval_out, eval_ks = "1,5,10";
  auto* eval_cmd = app.add_subcommand("evaluate", "retrieval metrics as a JSON report");
  eval_cmd->add_option("--sim", eval_sim)->required();
  eval_cmd->add_option("--truth", eval_truth)->required();
  eval_cmd->add_option("--Ks", eval_ks, "comma-separated cutoffs");
  eval_cmd->add_option("--out", eval_out, "report path (default: stdout)");
  add_norm_flags(eval_cmd, eval_norm);

  std::string diag_sim, diag_out;
  Index diag_k = 1;
  double diag_eps = 1e-9;
  auto* diag_cmd = app.add_subcommand("diagnose", "k-occurrence histogram, skewness, sparsity");
  diag_cmd->add_option("--sim", diag_sim)->required();
  diag_cmd->add_option("--k", diag_k)->check(CLI::PositiveNumber);
  diag_cmd->add_option("--eps-rel", diag_eps)->check(CLI::NonNegativeNumber);
  diag_cmd->add_option("--out", diag_out, "histogram path (default: stdout)");

  std::string emd_x;
  std::vector<std::string> emd_y;
  EmdConfig emd_cfg;
  std::string emd_cost = "euclidean";
  auto* emd_cmd = app.add_subcommand("emd", "earth mover's distance between embedding sets");
  emd_cmd->add_option("--x", emd_x)->required();
  emd_cmd->add_option("--y", emd_y, "one or more EMB1 files, concatenated")->required();
  emd_cmd->add_option("--subsample", emd_cfg.subsample)->check(CLI::PositiveNumber);
  emd_cmd->add_option("--repeats", emd_cfg.repeats)->check(CLI::PositiveNumber);
  emd_cmd->add_option("--seed", emd_cfg.seed);
  emd_cmd->add_option("--cost", emd_cost)->check(CLI::IsMember({"euclidean", "cosine"}));

  std::string sw_queries, sw_targets, sw_truth, sw_out;
  std::vector<double> sw_taus = {0.2, 0.1, 0.05, 0.02, 0.01};
  int sw_iters = 10;
  auto* sweep_cmd = app.add_subcommand("sweep-tau", "R@1 of IS and SN across temperatures");
  sweep_cmd->add_option("--queries", sw_queries)->required();
  sweep_cmd->add_option("--targets", sw_targets)->required();
  sweep_cmd->add_option("--truth", sw_truth)->required();
  sweep_cmd->add_option("--taus", sw_taus)->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--iters", sw_iters)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sw_out, "table path (default: stdout)");

  std::string bs_queries, bs_targets, bs_truth, bs_qbank, bs_tbank, bs_out;
  std::vector<double> bs_fractions = {0.1, 0.25, 0.5, 0.75, 1.0};
  double bs_is_tau = 0.02, bs_sn_tau = 0.01;
  int bs_iters = 10;
  std::uint64_t bs_seed = 0;
  auto* bank_cmd = app.add_subcommand("banksweep", "R@1, skewness and EMD against query-bank size");
  bank_cmd->add_option("--queries", bs_queries)->required();
  bank_cmd->add_option("--targets", bs_targets)->required();
  bank_cmd->add_option("--truth", bs_truth)->required();
  bank_cmd->add_option("--qbank", bs_qbank)->required();
  bank_cmd->add_option("--tbank", bs_tbank)->required();
  bank_cmd->add_option("--fractions", bs_fractions)->delimiter(',')->check(CLI::Range(0.0, 1.0));
  bank_cmd->add_option("--is-tau", bs_is_tau)->check(CLI::PositiveNumber);
  bank_cmd->add_option("--sn-tau", bs_sn_tau)->check(CLI::PositiveNumber);
  bank_cmd->add_option("--iters", bs_iters)->check(CLI::PositiveNumber);
  bank_cmd->add_option("--seed", bs_seed, "EMD subsampling seed");
  bank_cmd->add_option("--out", bs_out, "table path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  }

  // Writes either to the named file or to `out`.
  const auto with_sink = [&](const std::string& path, const auto& body) {
    if (path.empty()) {
      body(out);
    } else {
      std::ofstream file = open_out(path);
      body(file);
      if (!file) throw Error(ErrorCode::IoFailure, "short write to " + path);
    }
  };

  try {
    if (*synth_cmd) {
      const PairedSet paired = generate_paired(synth);
      fs::create_directories(synth_dir);
      const fs::path dir(synth_dir);
      io::write_embeddings(paired.queries, dir / "queries.emb");
      io::write_embeddings(paired.targets, dir / "targets.emb");
      io::write_ground_truth(paired.truth, dir / "truth.txt");
      if (synth_banks) {
        const BankSet banks = generate_banks(synth, paired);
        io::write_embeddings(banks.query_bank, dir / "qbank.emb");
        io::write_embeddings(banks.target_bank, dir / "tbank.emb");
      }
    } else if (*sim_cmd) {
      const EmbeddingSet q = io::read_embeddings(sim_queries).set;
      const EmbeddingSet t = io::read_embeddings(sim_targets).set;
      io::write_similarity(cosine_similarity_matrix(q, t), sim_out);
    } else if (*norm_cmd) {
      validate_norm(norm);
      io::write_similarity(normalize_scores(io::read_similarity(norm_in), norm).scores, norm_out);
    } else if (*eval_cmd) {
      validate_norm(eval_norm);
      const std::vector<Index> ks = parse_ks(eval_ks);
      const Normalized scored = normalize_scores(io::read_similarity(eval_sim), eval_norm);
      RetrievalReport report = evaluate(scored.scores, io::read_ground_truth(eval_truth), ks);
      report.skewness = skew_at(scored.scores, 1);
      report.normalization = eval_norm.method;
      report.params = scored.params;
      if (eval_out.empty()) {
        out << io::report_to_json(report);
      } else {
        io::write_report(report, eval_out);
      }
    } else if (*diag_cmd) {
      const SimilarityMatrix s = io::read_similarity(diag_sim);
      if (diag_k > s.cols()) throw UsageError("--k exceeds the number of targets");
      const KOccurrence occ = k_occurrence(row_argsort_desc(s), diag_k);
      std::map<std::int64_t, std::int64_t> histogram;
      for (const auto c : occ.counts) ++histogram[c];
      const Skewness skew = skewness(occ);
      with_sink(diag_out, [&](std::ostream& o) {
        o << "# skewness\t" << skew.value << "\n";
        o << "# sparsity\t" << sparsity(s.values(), diag_eps) << "\n";
        for (const auto& [count, freq] : histogram) o << count << "\t" << freq << "\n";
      });
    } else if (*emd_cmd) {
      emd_cfg.ground_cost = emd_cost == "cosine" ? GroundCost::one_minus_cosine : GroundCost::euclidean;
      const EmbeddingSet x = io::read_embeddings(emd_x).set;
      std::vector<Matrix> parts;
      Index rows = 0;
      for (const auto& path : emd_y) {
        parts.push_back(io::read_embeddings(path).set.data());
        rows += parts.back().rows();
        if (parts.back().cols() != x.dim()) {
          throw Error(ErrorCode::DimMismatch, path + " has dimension " + std::to_string(parts.back().cols()));
        }
      }
      Matrix y(rows, x.dim());
      Index at = 0;
      for (const auto& p : parts) {
        y.middleRows(at, p.rows()) = p;
        at += p.rows();
      }
      out << std::setprecision(17) << emd(x, EmbeddingSet(std::move(y)), emd_cfg) << "\n";
    } else if (*sweep_cmd) {
      const SimilarityMatrix s = cosine_similarity_matrix(io::read_embeddings(sw_queries).set,
                                                          io::read_embeddings(sw_targets).set);
      const GroundTruth gt = io::read_ground_truth(sw_truth);
      with_sink(sw_out, [&](std::ostream& o) {
        o << "tau\tmethod\tR@1\n";
        for (const double tau : sw_taus) {
          o << tau << "\tis\t" << r_at_1(apply_hubness(s, is_hubness(s, tau)), gt) << "\n";
          o << tau << "\tsn\t" << r_at_1(sn_normalize(s, SinkhornConfig{tau, sw_iters}), gt) << "\n";
        }
      });
    } else if (*bank_cmd) {
      const EmbeddingSet q = io::read_embeddings(bs_queries).set;
      const EmbeddingSet t = io::read_embeddings(bs_targets).set;
      const EmbeddingSet qbank = io::read_embeddings(bs_qbank).set;
      const EmbeddingSet tbank = io::read_embeddings(bs_tbank).set;
      const GroundTruth gt = io::read_ground_truth(bs_truth);
      const SimilarityMatrix s = cosine_similarity_matrix(q, t);
      Matrix targets_and_tbank(t.count() + tbank.count(), t.dim());
      targets_and_tbank << t.data(), tbank.data();
      const EmbeddingSet joint(std::move(targets_and_tbank));
      const SinkhornConfig scfg{bs_sn_tau, bs_iters};
      EmdConfig ecfg;
      ecfg.seed = bs_seed;
      with_sink(bs_out, [&](std::ostream& o) {
        o << "fraction\tbank_size\tmethod\tR@1\tskewness\temd\n";
        for (const double fraction : bs_fractions) {
          const auto size = std::max<Index>(
              1, static_cast<Index>(std::llround(fraction * static_cast<double>(qbank.count()))));
          const EmbeddingSet qb(head_rows(qbank.data(), size));
          const SimilarityMatrix sbt = cosine_similarity_matrix(qb, t, Role::query_bank);
          const SimilarityMatrix sbb =
              cosine_similarity_matrix(qb, tbank, Role::query_bank, Role::target_bank);
          const double emd_t = emd(qb, t, ecfg);
          const double emd_joint = emd(qb, joint, ecfg);
          const auto row = [&](const char* method, const SimilarityMatrix& scores, double gap) {
            o << fraction << "\t" << size << "\t" << method << "\t" << r_at_1(scores, gt) << "\t"
              << skew_at(scores, 1) << "\t" << gap << "\n";
          };
          row("is", apply_hubness(s, is_hubness(sbt, bs_is_tau)), emd_t);
          row("sn", apply_hubness(s, estimate_target_hubness(sbt, scfg)), emd_t);
          row("dbsn", dbsn(s, sbt, sbb, scfg), emd_joint);
        }
      });
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return data_error;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return data_error;
  }
  return ok;
}

}  // namespace hubkit::cli
