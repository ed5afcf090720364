// Copyright 2026 The smokearchive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smokearchive/cli.h"

#include <deque>
#include <functional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "smokearchive/archive.h"
#include "smokearchive/config.h"
#include "smokearchive/corpusgen.h"
#include "smokearchive/fetcher.h"
#include "smokearchive/fsutil.h"
#include "smokearchive/indexer.h"
#include "smokearchive/pvanalysis.h"
#include "smokearchive/query.h"
#include "smokearchive/sequencer.h"

namespace smokearchive {

namespace fs = std::filesystem;

namespace {

/// A flag whose value is routed through PipelineConfig::set.
struct Bound {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct Context {
  PipelineConfig config;
  std::ostream& out;
  std::ostream& err;
  bool verbose = false;

  void log(std::string_view module, std::string_view message) const {
    if (verbose) err << "[" << module << "] " << message << "\n";
  }
};

template <typename T>
const T& need(const std::optional<T>& v, std::string_view what) {
  if (!v) throw UsageError(fmt::format("{} is required", what));
  return *v;
}

const fs::path& need_path(const fs::path& p, std::string_view flag) {
  if (p.empty()) throw UsageError(fmt::format("{} is required", flag));
  return p;
}

Site parse_site(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 2) throw UsageError(fmt::format("--site '{}': expected LAT,LON", text));
  try {
    return {std::stod(parts[0]), std::stod(parts[1])};
  } catch (const std::exception&) {
    throw UsageError(fmt::format("--site '{}': expected LAT,LON", text));
  }
}

HourStep parse_hour_arg(const std::string& text, std::string_view flag) {
  try {
    return HourStep::from_instant(parse_iso(text));
  } catch (const Error& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

/// Drift geometry paired with a preset canonical grid.
std::optional<GridGeometry> default_drift(const GridGeometry& canonical) {
  if (canonical == desk_geometry()) return desk_drift_geometry();
  if (canonical == full_geometry()) return full_drift_geometry();
  return std::nullopt;
}

std::vector<ScanRecord> scan_nonempty(const Context& ctx, std::string_view module) {
  const auto& cache = need_path(ctx.config.cache, "--cache");
  ScanOptions opts;
  opts.canonical = ctx.config.canonical;
  opts.drift = ctx.config.drift ? ctx.config.drift : default_drift(ctx.config.canonical);
  opts.workers = ctx.config.workers;
  if (!fs::is_directory(cache)) {
    throw Error(std::string(module), fmt::format("empty cache: {} does not exist", cache.string()));
  }
  auto records = scan_cache(cache, opts);
  ctx.log("indexer", fmt::format("scanned {} files", records.size()));
  if (records.empty()) {
    throw Error(std::string(module), fmt::format("empty cache: no granules under {}; run fetch first", cache.string()));
  }
  return records;
}

// ---- subcommands -----------------------------------------------------------

struct GenCorpusArgs {
  std::string drift_until;
  std::optional<double> missing, html, truncation;
  bool no_faults = false;
  bool every_init = false;
  int horizon = 84;
  std::string site_out;
  std::string site = "51.05,-114.07";
};

int cmd_gen_corpus(Context& ctx, const GenCorpusArgs& a) {
  const auto& cfg = ctx.config;
  CorpusSpec spec;
  spec.forecast_ids = cfg.forecast_ids;
  spec.start_date = need(cfg.start_date, "--from");
  spec.end_date = need(cfg.end_date, "--to");
  spec.geometry = cfg.canonical;
  spec.horizon_hours = a.horizon;
  spec.seed = cfg.seed;
  spec.every_id_every_init = a.every_init;
  if (!a.drift_until.empty()) {
    const auto drift = cfg.drift ? cfg.drift : default_drift(cfg.canonical);
    if (!drift) throw UsageError("--drift-until needs --drift-geometry for a custom grid");
    spec.drift = DriftSchedule{*drift, parse_date(a.drift_until)};
  }
  if (a.no_faults) spec.faults = FaultProfile::none();
  if (a.missing) spec.faults.missing_run_rate = *a.missing;
  if (a.html) spec.faults.html_rate = *a.html;
  if (a.truncation) spec.faults.truncation_rate = *a.truncation;
  const auto& root = need_path(cfg.corpus, "--out");

  const auto manifest = generate_corpus(spec, root, cfg.workers);
  ctx.out << fmt::format("runs={} ok={} missing={} html={} truncated={}\n", manifest.runs.size(),
                         manifest.count(RunOutcome::ok), manifest.count(RunOutcome::missing),
                         manifest.count(RunOutcome::html), manifest.count(RunOutcome::truncated));
  if (!a.site_out.empty()) {
    SiteSpec site;
    const auto s = parse_site(a.site);
    site.lat = s.lat;
    site.lon = s.lon;
    site.utc_offset_hours = cfg.analysis.utc_offset_hours;
    const auto obs = synthesize_site(spec, site, spec.start_date, spec.end_date);
    write_site_observations(obs, a.site_out, site.utc_offset_hours);
    ctx.log("corpusgen", fmt::format("wrote site observations to {}", a.site_out));
  }
  return 0;
}

struct FetchArgs {
  std::string report;
  std::string url_template;
  std::string ext;
  int attempts = 3;
  int backoff_ms = 1000;
  bool probe = false;
  int gap_tolerance = 14;
};

int cmd_fetch(Context& ctx, const FetchArgs& a) {
  const auto& cfg = ctx.config;
  if (cfg.endpoint.empty()) throw UsageError("--base is required");
  SourceEndpoint ep;
  ep.base = cfg.endpoint;
  if (!a.url_template.empty()) ep.url_template = a.url_template;
  if (!a.ext.empty()) ep.ext = a.ext;
  ep.validate();
  const auto start = need(cfg.start_date, "--from");
  const auto end = need(cfg.end_date, "--to");
  if (cfg.forecast_ids.empty()) throw UsageError("--ids is empty");

  if (a.probe) {
    ProbeOptions po;
    po.gap_tolerance_days = a.gap_tolerance;
    po.transport = make_transport(ep.base);
    ctx.out << "forecast_id,earliest,requests\n";
    for (const auto& id : cfg.forecast_ids) {
      const auto r = probe_earliest(ep, id, start, end, po);
      ctx.out << fmt::format("{},{},{}\n", id, r.earliest ? format_date(*r.earliest) : "", r.requests);
    }
    return 0;
  }

  const auto& cache = need_path(cfg.cache, "--cache");
  FetchOptions fo;
  fo.parallel = cfg.parallel;
  fo.max_attempts = a.attempts;
  fo.initial_backoff = std::chrono::milliseconds(a.backoff_ms);
  const auto report = fetch_range(ep, cfg.forecast_ids, start, end, cache, fo);
  const fs::path report_path = a.report.empty() ? cache / "fetch_report.csv" : fs::path(a.report);
  write_fetch_report_csv(report, report_path);
  ctx.out << fmt::format("downloaded={} skipped={} not_found={} invalid_content={} io_error={} bytes={}\n",
                         report.count(FetchOutcome::downloaded), report.count(FetchOutcome::skipped),
                         report.count(FetchOutcome::not_found), report.count(FetchOutcome::invalid_content),
                         report.count(FetchOutcome::io_error), report.bytes_transferred());
  return 0;
}

struct ValidateArgs {
  std::string dump_index;
  std::string json;
};

int cmd_validate(Context& ctx, const ValidateArgs& a) {
  const auto records = scan_nonempty(ctx, "indexer");
  const auto report = consistency_report(records, ctx.config.canonical);
  ctx.out << format_report(report);
  if (!a.json.empty()) atomic_write_text(a.json, to_json(report).dump(2) + "\n");
  if (!a.dump_index.empty()) atomic_write_text(a.dump_index, build_coverage(records).to_json().dump(2) + "\n");
  return 0;
}

struct SequenceArgs {
  std::string from;
  std::string to;
  std::string explain;
};

int cmd_sequence(Context& ctx, const SequenceArgs& a) {
  const auto& cfg = ctx.config;
  const auto& out_dir = need_path(cfg.plan_dir, "--out");
  const auto records = scan_nonempty(ctx, "sequencer");
  const auto index = build_coverage(records);
  if (index.empty()) {
    throw Error("sequencer",
                fmt::format("empty cache: no readable granules under {}; run validate", cfg.cache.string()));
  }
  HourStep start = index.first(), end = index.last();
  if (!a.from.empty()) {
    start = parse_hour_arg(a.from, "--from");
  } else if (cfg.start_date) {
    start = HourStep::from_date(*cfg.start_date);
  }
  if (!a.to.empty()) {
    end = parse_hour_arg(a.to, "--to");
  } else if (cfg.end_date) {
    end = HourStep::from_date(*cfg.end_date, 23);
  }
  const auto plan = plan_sequence(index, start, end);
  write_plan_csv(plan, cfg.canonical, out_dir / "plan.csv");
  write_gaps_csv(plan, out_dir / "gaps.csv");
  ctx.out << fmt::format("hours={} picks={} gaps={}\n", plan.picks.size() + plan.gaps.size(), plan.picks.size(),
                         plan.gaps.size());
  if (!a.explain.empty()) {
    const auto t = parse_hour_arg(a.explain, "--explain");
    ctx.out << "rank,forecast_id,smoke_init_utc,frame_index,eligible,selected,path\n";
    int rank = 0;
    for (const auto& r : explain_pick(plan, index, t)) {
      ctx.out << fmt::format("{},{},{},{},{},{},{}\n", ++rank, r.candidate.forecast_id,
                             format_iso(r.candidate.smoke_init), r.candidate.frame_index, r.eligible ? 1 : 0,
                             r.selected ? 1 : 0, r.candidate.path.generic_string());
    }
  }
  return 0;
}

struct BuildArgs {
  std::string plan;
  bool no_originals = false;
};

int cmd_build_archive(Context& ctx, const BuildArgs& a) {
  const auto& cfg = ctx.config;
  if (a.plan.empty()) throw UsageError("--plan is required");
  const fs::path plan_path = a.plan;
  const auto plan = read_plan_csv(plan_path, plan_path.parent_path() / "gaps.csv");
  BuildOptions bo;
  bo.levels = cfg.levels;
  bo.keep_originals = !a.no_originals;
  const auto m = build_archive(plan, need_path(cfg.cache, "--cache"), cfg.canonical,
                               need_path(cfg.archive, "--out"), bo);
  ctx.out << fmt::format("frames={} gaps={} levels={} originals={}\n", m.frames, m.gaps.size(), m.levels,
                         m.originals ? 1 : 0);
  return 0;
}

struct QueryArgs {
  std::optional<double> lat, lon;
  std::string from;
  std::string to;
  std::string csv;
};

int cmd_query(Context& ctx, const QueryArgs& a) {
  const auto& cfg = ctx.config;
  const auto archive = Archive::open(need_path(cfg.archive, "--archive"));
  if (a.from.empty()) throw UsageError("--from is required");
  const auto t0 = parse_hour_arg(a.from, "--from");
  const auto t1 = a.to.empty() ? t0 : parse_hour_arg(a.to, "--to");
  const auto series = sample_series(archive, t0, t1, need(a.lat, "--lat"), need(a.lon, "--lon"), cfg.mode);
  for (const auto t : series.gaps) ctx.err << "[query] gap at " << format_iso(t) << "\n";
  if (a.csv.empty()) {
    ctx.out << series_csv(series);
  } else {
    write_series_csv(series, a.csv);
    ctx.out << fmt::format("values={} gaps={}\n", series.values.size(), series.gaps.size());
  }
  return 0;
}

struct AnalyzeArgs {
  std::string solar;
  std::string cloud;
  std::string flags;
  std::string site;
  std::string out;
};

struct AnalysisInputs {
  std::vector<SolarRecord> solar;
  std::map<Date, double> cloud;
  std::map<Date, bool> flags;
  Site site;
};

AnalysisInputs load_inputs(const AnalyzeArgs& a) {
  if (a.solar.empty()) throw UsageError("--solar is required");
  if (a.cloud.empty()) throw UsageError("--cloud is required");
  if (a.site.empty()) throw UsageError("--site is required");
  AnalysisInputs in;
  in.solar = read_solar_csv(a.solar);
  in.cloud = read_cloud_csv(a.cloud);
  if (!a.flags.empty()) in.flags = read_flags_csv(a.flags);
  in.site = parse_site(a.site);
  return in;
}

std::string fit_line(const AnalysisReport& report) {
  if (!report.fit) return "nan,nan,nan,0";
  return fmt::format("{},{},{},{}", report.fit->slope, report.fit->intercept, report.fit->r_squared,
                     report.fit->n_points);
}

int cmd_analyze(Context& ctx, const AnalyzeArgs& a) {
  const auto& cfg = ctx.config;
  const auto archive = Archive::open(need_path(cfg.archive, "--archive"));
  const auto in = load_inputs(a);
  if (a.out.empty()) throw UsageError("--out is required");
  const auto report = analyze(in.solar, in.cloud, in.flags, archive, in.site, cfg.mode, cfg.analysis);
  write_report_csv(report, a.out);
  for (const auto& x : report.excluded) {
    ctx.log("pvanalysis", fmt::format("excluded {}: {}", format_date(x.date), x.reason));
  }
  ctx.out << "slope,intercept,r2,n\n" << fit_line(report) << "\n";
  if (!report.fit) ctx.err << "[pvanalysis] " << report.fit_error << "\n";
  return 0;
}

int cmd_plot(Context& ctx, const AnalyzeArgs& a) {
  const auto& cfg = ctx.config;
  const auto archive = Archive::open(need_path(cfg.archive, "--archive"));
  const auto in = load_inputs(a);
  if (a.out.empty()) throw UsageError("--out is required");
  const double offset = cfg.analysis.utc_offset_hours;
  const auto report = analyze(in.solar, in.cloud, in.flags, archive, in.site, cfg.mode, cfg.analysis);

  std::map<Date, std::map<std::chrono::seconds, double>> by_day;
  for (const auto& r : in.solar) {
    const auto d = local_date(r.timestamp, offset);
    const auto local = r.timestamp + std::chrono::seconds(std::llround(offset * 3600.0));
    by_day[d][local - std::chrono::floor<std::chrono::days>(local)] = r.energy_kwh * 4.0;
  }

  // Actual vs expected output with hourly PM2.5, per analyzed day.
  std::string series = "timestamp_local,output_kw,expected_kw,pm25_ugm3\n";
  for (const auto& row : report.rows) {
    const auto& today = by_day[row.day.date];
    const auto* ref = row.reference ? &by_day[*row.reference] : nullptr;
    for (const auto& [tod, kw] : today) {
      const auto t = Instant((row.day.date + tod).time_since_epoch()) -
                     std::chrono::seconds(std::llround(offset * 3600.0));
      std::string expected;
      if (ref) {
        if (const auto it = ref->find(tod); it != ref->end()) expected = fmt::format("{}", it->second);
      }
      std::string pm;
      const auto hour = HourStep::from_instant(std::chrono::floor<std::chrono::hours>(t));
      if (archive.in_range(hour) && archive.covered(hour)) {
        pm = fmt::format("{}", sample_point(archive, hour, in.site.lat, in.site.lon, cfg.mode));
      }
      series += fmt::format("{},{},{},{}\n", format_iso_local(t, offset), kw, expected, pm);
    }
  }
  std::string scatter = "date,avg_pm25,ratio,avg_cloud_pct,used_in_fit\n";
  for (const auto& row : report.rows) {
    if (!row.ratio) continue;
    scatter += fmt::format("{},{},{},{},{}\n", format_date(row.day.date), row.day.avg_pm25, *row.ratio,
                           row.day.avg_cloud_pct, row.used_in_fit ? 1 : 0);
  }
  const fs::path dir = a.out;
  atomic_write_text(dir / "series.csv", series);
  atomic_write_text(dir / "scatter.csv", scatter);
  atomic_write_text(dir / "fit.csv", "slope,intercept,r2,n\n" + fit_line(report) + "\n");
  ctx.out << fmt::format("wrote {} {} {}\n", (dir / "series.csv").string(), (dir / "scatter.csv").string(),
                         (dir / "fit.csv").string());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curated hourly PM2.5 archives from overlapping smoke forecasts", "smokearchive"};
  app.require_subcommand(1);
  app.fallthrough();

  std::deque<Bound> bound;
  auto bind = [&](CLI::App* sub, const std::string& flags, const std::string& key, const std::string& help) {
    auto& b = bound.emplace_back();
    b.key = key;
    b.option = sub->add_option(flags, b.value, help);
  };

  std::string config_path;
  bool verbose = false;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_flag("--verbose,-v", verbose, "progress messages on stderr");
  bind(&app, "--seed", "seed", "random seed");

  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic forecast corpus");
  GenCorpusArgs gen_args;
  bind(gen, "--out", "corpus", "corpus root");
  bind(gen, "--from", "start", "first init date YYYY-MM-DD");
  bind(gen, "--to", "end", "last init date YYYY-MM-DD");
  bind(gen, "--ids", "forecast_ids", "comma-separated forecast ids");
  bind(gen, "--geometry", "geometry", "canonical grid");
  bind(gen, "--drift-geometry", "drift_geometry", "early-season grid");
  bind(gen, "--workers", "workers", "writer threads");
  gen->add_option("--drift-until", gen_args.drift_until, "runs before this date use the drift grid");
  gen->add_option("--missing-rate", gen_args.missing, "fraction of runs never published");
  gen->add_option("--html-rate", gen_args.html, "fraction served as an HTML error page");
  gen->add_option("--truncation-rate", gen_args.truncation, "fraction truncated mid-payload");
  gen->add_flag("--no-faults", gen_args.no_faults, "disable fault injection");
  gen->add_flag("--every-init", gen_args.every_init, "run every id at every init hour");
  gen->add_option("--horizon", gen_args.horizon, "forecast hours per run");
  gen->add_option("--site-out", gen_args.site_out, "also write solar/cloud/flags CSVs here");
  gen->add_option("--site", gen_args.site, "PV site LAT,LON");

  auto* fetch = app.add_subcommand("fetch", "download granules into the cache");
  FetchArgs fetch_args;
  bind(fetch, "--base", "endpoint", "base URL or directory");
  bind(fetch, "--ids", "forecast_ids", "comma-separated forecast ids");
  bind(fetch, "--from", "start", "first date YYYY-MM-DD");
  bind(fetch, "--to", "end", "last date YYYY-MM-DD");
  bind(fetch, "--cache", "cache", "cache root");
  bind(fetch, "--parallel", "parallel", "concurrent downloads");
  fetch->add_option("--report", fetch_args.report, "report CSV (default CACHE/fetch_report.csv)");
  fetch->add_option("--template", fetch_args.url_template, "URL path template");
  fetch->add_option("--ext", fetch_args.ext, "file extension placeholder value");
  fetch->add_option("--attempts", fetch_args.attempts, "attempts per file");
  fetch->add_option("--backoff-ms", fetch_args.backoff_ms, "first retry delay");
  fetch->add_flag("--probe", fetch_args.probe, "only report the earliest available date per id");
  fetch->add_option("--gap-tolerance", fetch_args.gap_tolerance, "probe: longest tolerated run of missing days");

  auto* validate = app.add_subcommand("validate", "scan the cache and report geometry consistency");
  ValidateArgs validate_args;
  bind(validate, "--cache", "cache", "cache root");
  bind(validate, "--geometry", "geometry", "canonical grid");
  bind(validate, "--drift-geometry", "drift_geometry", "known drift grid");
  bind(validate, "--workers", "workers", "scan threads");
  validate->add_option("--dump-index", validate_args.dump_index, "write the coverage index as JSON");
  validate->add_option("--json", validate_args.json, "write the report as JSON");

  auto* sequence = app.add_subcommand("sequence", "pick the latest forecast frame for every hour");
  SequenceArgs sequence_args;
  bind(sequence, "--cache", "cache", "cache root");
  bind(sequence, "--out", "plan_dir", "directory for plan.csv and gaps.csv");
  bind(sequence, "--geometry", "geometry", "canonical grid");
  bind(sequence, "--workers", "workers", "scan threads");
  sequence->add_option("--from", sequence_args.from, "first hour (ISO 8601)");
  sequence->add_option("--to", sequence_args.to, "last hour (ISO 8601)");
  sequence->add_option("--explain", sequence_args.explain, "print the ranked candidates for one hour");

  auto* build = app.add_subcommand("build-archive", "materialize a plan into an archive");
  BuildArgs build_args;
  build->add_option("--plan", build_args.plan, "plan.csv (gaps.csv is read beside it)");
  bind(build, "--cache", "cache", "cache root");
  bind(build, "--out", "archive", "archive directory");
  bind(build, "--levels", "levels", "pyramid levels including level 0");
  bind(build, "--geometry", "geometry", "canonical grid");
  build->add_flag("--no-originals", build_args.no_originals, "drop pre-resample frames");

  auto* query = app.add_subcommand("query", "sample a point series from an archive");
  QueryArgs query_args;
  bind(query, "--archive", "archive", "archive directory");
  bind(query, "--mode", "mode", "sw|bilinear");
  query->add_option("--lat", query_args.lat, "latitude");
  query->add_option("--lon", query_args.lon, "longitude");
  query->add_option("--from", query_args.from, "first hour (ISO 8601)");
  query->add_option("--to", query_args.to, "last hour (ISO 8601)");
  query->add_option("--csv", query_args.csv, "write CSV here instead of stdout");

  AnalyzeArgs analyze_args;
  auto add_analysis = [&](CLI::App* sub, const std::string& out_help) {
    bind(sub, "--archive", "archive", "archive directory");
    bind(sub, "--mode", "mode", "sw|bilinear");
    bind(sub, "--cloud-max", "cloud_max", "drop days cloudier than this percentage from the fit");
    bind(sub, "--threshold", "clear_sky_threshold", "clear-sky smoothness threshold");
    bind(sub, "--utc-offset", "utc_offset", "fixed local offset in hours");
    bind(sub, "--pairing-days", "pairing_days", "max days between a day and its reference");
    sub->add_option("--solar", analyze_args.solar, "solar CSV");
    sub->add_option("--cloud", analyze_args.cloud, "cloud CSV");
    sub->add_option("--flags", analyze_args.flags, "smoke flag CSV");
    sub->add_option("--site", analyze_args.site, "LAT,LON");
    sub->add_option("--out", analyze_args.out, out_help);
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "PV output ratio against PM2.5 regression");
  add_analysis(analyze_cmd, "report CSV");
  auto* plot = app.add_subcommand("plot", "series and scatter CSVs for plotting");
  add_analysis(plot, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Context ctx{PipelineConfig{}, out, err, verbose};
  try {
    if (!config_path.empty()) ctx.config.load(config_path);
    for (const auto& b : bound) {
      if (b.option->count() > 0) ctx.config.set(b.key, b.value);
    }
    ctx.config.validate();
    if (gen->parsed()) return cmd_gen_corpus(ctx, gen_args);
    if (fetch->parsed()) return cmd_fetch(ctx, fetch_args);
    if (validate->parsed()) return cmd_validate(ctx, validate_args);
    if (sequence->parsed()) return cmd_sequence(ctx, sequence_args);
    if (build->parsed()) return cmd_build_archive(ctx, build_args);
    if (query->parsed()) return cmd_query(ctx, query_args);
    if (analyze_cmd->parsed()) return cmd_analyze(ctx, analyze_args);
    if (plot->parsed()) return cmd_plot(ctx, analyze_args);
    return 2;
  } catch (const UsageError& e) {
    err << "[" << e.module() << "] " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "[" << e.module() << "] " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "[cli] " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"smokearchive"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace smokearchive
