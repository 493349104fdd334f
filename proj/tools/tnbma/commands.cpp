#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pipeline.hpp"
#include "report_io.hpp"
#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"
#include "tnbma/log.hpp"
#include "tnbma/synthetic.hpp"

namespace tnbma::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

GroupSpec resolve_groups(const std::string& value) {
  if (value == "two-group") return GroupSpec::two_group();
  if (value == "three-group") return GroupSpec::three_group();
  std::ifstream in(value);
  if (!in) {
    throw ParseError("--groups: not a preset (two-group, three-group) and not a readable "
                     "spec file: " + value);
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return GroupSpec::parse(line);
  }
  throw ParseError("--groups: spec file is empty: " + value);
}

// The three-group layout reads the same 11-member ensemble as control plus
// odd- and even-numbered perturbed members, so a two-group archive can be
// regrouped by interleaving.  Any other mismatch is an error.
Archive apply_grouping(Archive archive, const GroupSpec& requested) {
  if (archive.spec() == requested) return archive;
  if (archive.spec() == GroupSpec::two_group() && requested == GroupSpec::three_group()) {
    std::vector<ForecastCase> rows;
    rows.reserve(archive.rows().size());
    for (const ForecastCase& r : archive.rows()) {
      ForecastCase out = r;
      out.members.clear();
      out.members.push_back(r.members[0]);                              // control
      for (int l = 1; l <= 10; l += 2) out.members.push_back(r.members[l]);  // odd
      for (int l = 2; l <= 10; l += 2) out.members.push_back(r.members[l]);  // even
      rows.push_back(std::move(out));
    }
    return Archive(requested, std::move(rows));
  }
  throw ParseError("requested groups (" + requested.to_string() +
                   ") do not match the archive layout (" + archive.spec().to_string() + ")");
}

std::vector<Variant> resolve_variants(const std::string& value) {
  if (value == "all") {
    return {Variant::naive, Variant::mean_corrected, Variant::full_ml};
  }
  return {parse_variant(value)};
}

void validate_levels(const std::vector<double>& levels) {
  if (levels.empty()) throw ParseError("--levels: needs at least one level");
  for (double l : levels) {
    if (!(l > 0.0 && l < 100.0)) {
      throw ParseError("--levels: levels are percentages in (0, 100)");
    }
  }
}

PipelineOptions make_options(const CommonArgs& args, const std::vector<Variant>& variants) {
  validate_levels(args.levels_percent);
  PipelineOptions opt;
  opt.variants = variants;
  opt.training_days = args.training_days;
  opt.levels_percent = args.levels_percent;
  opt.seed = args.seed;
  opt.jobs = args.jobs;
  return opt;
}

int plan_exit_code(const PipelineResult& result) {
  if (result.any_failed || !result.all_converged) return kExitNumeric;
  return kExitOk;
}

}  // namespace

int cmd_fit(const CommonArgs& args) {
  const GroupSpec spec = resolve_groups(args.groups);
  Archive archive = apply_grouping(Archive::parse_file(args.archive_path), spec);
  const std::vector<Variant> variants = resolve_variants(args.variant);
  PipelineOptions options = make_options(args, variants);
  options.score_cases = false;

  PipelineResult result = run_pipeline(archive, options);
  if (!args.date.empty()) {
    const Date wanted = parse_date(args.date);
    std::erase_if(result.dates, [&](const DateResult& d) { return d.date != wanted; });
    if (result.dates.empty()) {
      log::error("date ", args.date, " is not a usable verification date");
      return kExitInput;
    }
  }
  if (result.dates.empty()) {
    log::error("no verification dates with sufficient training data");
    return kExitInput;
  }

  for (size_t v = 0; v < variants.size(); ++v) {
    const fs::path dir = fs::path(args.out_dir) / "models" / variant_name(variants[v]);
    fs::create_directories(dir);
    for (const DateResult& d : result.dates) {
      const FitOutcome& fit = d.fits[v];
      const std::string stem = format_date(d.date);
      std::ofstream diag(dir / (stem + ".diag"), std::ios::binary);
      if (fit.failed) {
        diag << "error = " << fit.error << '\n';
        continue;
      }
      diag << fit.diagnostics.to_key_value();
      fit.model.save(dir / (stem + ".model"));
    }
  }
  std::cout << "wrote models for " << result.dates.size() << " date(s) under "
            << (fs::path(args.out_dir) / "models").string() << "\n";
  return plan_exit_code(result);
}

int cmd_verify(const CommonArgs& args) {
  const GroupSpec spec = resolve_groups(args.groups);
  Archive archive = apply_grouping(Archive::parse_file(args.archive_path), spec);
  const std::vector<Variant> variants = resolve_variants(args.variant);
  const PipelineOptions options = make_options(args, variants);

  const PipelineResult result = run_pipeline(archive, options);
  if (result.dates.empty()) {
    log::error("no verification dates with sufficient training data");
    return kExitInput;
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  std::vector<VerificationReport> reports;
  for (size_t v = 0; v < variants.size(); ++v) {
    const std::vector<CaseScore> scores = collect_scores(result, v);
    if (scores.empty()) {
      log::error("no verification cases with observations");
      return kExitInput;
    }
    reports.push_back(assemble_report(variant_name(variants[v]), scores,
                                      options.levels_percent));
    PitSample pits;
    for (const CaseScore& s : scores) pits.values.push_back(s.pit_value);
    write_pit_histogram_csv(out_dir / ("pit_" + variant_name(variants[v]) + ".csv"),
                            pit_histogram(pits));

    std::ofstream diag(out_dir / ("diagnostics_" + variant_name(variants[v]) + ".csv"),
                       std::ios::binary);
    diag << "date,iterations,converged,final_log_likelihood,sigma_floored,flags\n";
    for (const DateResult& d : result.dates) {
      const FitOutcome& f = d.fits[v];
      diag << format_date(d.date) << ',';
      if (f.failed) {
        diag << "0,error,,," << f.error << '\n';
        continue;
      }
      diag << f.diagnostics.iterations << ',' << (f.diagnostics.converged ? "true" : "false")
           << ',' << format_metric(f.diagnostics.final_log_likelihood) << ','
           << (f.diagnostics.sigma_floored ? "true" : "false") << ',';
      for (size_t i = 0; i < f.diagnostics.flags.size(); ++i) {
        if (i > 0) diag << ';';
        diag << f.diagnostics.flags[i];
      }
      diag << '\n';
    }
  }

  const std::vector<CaseScore> raw_scores = collect_raw_scores(result);
  long raw_skipped = 0;
  for (const DateResult& d : result.dates) raw_skipped += d.skipped_incomplete_raw;
  if (!raw_scores.empty()) {
    reports.push_back(assemble_report("raw-ensemble", raw_scores, options.levels_percent));
  }

  // Rank histogram of the raw ensemble over the verification cases.
  std::vector<ForecastCase> verification_cases;
  for (const DateResult& d : result.dates) {
    for (const ForecastCase* fc : archive.rows_on(d.date)) {
      verification_cases.push_back(*fc);
    }
  }
  const RankHistogram ranks =
      rank_histogram(verification_cases, archive.spec().total_members(), args.seed);
  write_rank_histogram_csv(out_dir / "rank_raw.csv", ranks.counts);

  for (const VerificationReport& r : reports) {
    write_metrics_csv(out_dir / ("metrics_" + r.source + ".csv"), r);
  }
  write_comparison_csv(out_dir / "comparison.csv", reports);
  write_ks_csv(out_dir / "ks.csv", reports);

  std::vector<std::pair<std::string, std::string>> notes;
  notes.emplace_back("verification dates", std::to_string(result.dates.size()));
  notes.emplace_back("omitted dates", std::to_string(result.plan.omitted.size()));
  for (const auto& om : result.plan.omitted) {
    notes.emplace_back("  omitted " + format_date(om.date), om.reason);
  }
  double containment = 0.0;
  if (!raw_scores.empty()) {
    std::vector<ForecastCase> complete;
    for (const ForecastCase& fc : verification_cases) {
      if (fc.complete()) complete.push_back(fc);
    }
    containment = ensemble_containment(complete);
  }
  write_summary_text(out_dir / "summary.txt", reports, containment, raw_skipped, notes);

  std::cout << "verification over " << result.dates.size() << " dates written to "
            << out_dir.string() << "\n";
  return plan_exit_code(result);
}

int cmd_predict(const PredictArgs& args) {
  validate_levels(args.levels_percent);
  const BmaModel model = BmaModel::load(args.model_path);
  Archive archive = apply_grouping(Archive::parse_file(args.archive_path), model.spec());
  const Date date = parse_date(args.date);
  const auto rows = archive.rows_on(date);
  if (rows.empty()) {
    log::error("no cases on date ", args.date);
    return kExitInput;
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / ("predictions_" + args.date + ".csv"), std::ios::binary);
  out << "station,date,median";
  for (double l : args.levels_percent) {
    out << ",lo_" << format_level(l) << ",hi_" << format_level(l);
  }
  const GroupSpec& spec = model.spec();
  for (const auto& g : spec.groups()) {
    for (int l = 1; l <= g.member_count; ++l) out << ",mu." << g.id << '.' << l;
  }
  out << ",sigma,renormalized,missing_members\n";

  for (const ForecastCase* fc : rows) {
    if (fc->present_count() == 0) {
      log::warn("skipping ", fc->station, " ", args.date, ": no members present");
      continue;
    }
    const CaseMixture mix(model, *fc);
    out << fc->station << ',' << args.date << ',' << format_real(mix.quantile(0.5));
    for (double l : args.levels_percent) {
      const auto [lo, hi] = mix.central_interval(l / 100.0);
      out << ',' << format_real(lo) << ',' << format_real(hi);
    }
    for (int k = 0; k < spec.group_count(); ++k) {
      for (int l = 0; l < spec.groups()[k].member_count; ++l) {
        const MemberValue& mv = fc->members[spec.flat_index(k, l)];
        out << ',';
        if (mv.present) out << format_real(model.location(k, mv.value));
      }
    }
    out << ',' << format_real(model.sigma()) << ','
        << (mix.renormalized() ? "true" : "false") << ','
        << (fc->members.size() - static_cast<size_t>(fc->present_count())) << '\n';
  }
  std::cout << "predictions written to " << (out_dir / ("predictions_" + args.date + ".csv")).string()
            << "\n";
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
  SynthConfig config =
      args.config_path.empty() ? SynthConfig::defaults() : SynthConfig::load(args.config_path);
  if (!args.groups.empty()) {
    const GroupSpec spec = resolve_groups(args.groups);
    if (!(spec == config.truth.spec())) {
      // Even member weights and a common location link for ad-hoc specs.
      std::vector<BmaModel::GroupParams> params;
      for (int k = 0; k < spec.group_count(); ++k) {
        params.push_back({1.0 / spec.total_members(), 0.3, 1.0});
      }
      config.truth = BmaModel(spec, std::move(params), 1.1);
    }
  }
  if (args.stations > 0) config.station_count = args.stations;
  if (args.days > 0) config.day_count = args.days;
  if (args.seed_set) config.seed = args.seed;

  const Archive archive = generate_synthetic(config);
  const fs::path out(args.out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  archive.write_file(out);
  std::cout << "archive " << out.string() << " (" << archive.rows().size()
            << " rows), seed = " << config.seed << "\n";
  return kExitOk;
}

}  // namespace tnbma::cli
