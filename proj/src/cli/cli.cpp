#include "blockframe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "blockframe/catalog.hpp"
#include "blockframe/error.hpp"
#include "blockframe/frame_io.hpp"
#include "blockframe/log.hpp"
#include "blockframe/metrics.hpp"
#include "blockframe/parallel.hpp"
#include "blockframe/search.hpp"
#include "blockframe/spectra.hpp"
#include "blockframe/text.hpp"
#include "blockframe/version.hpp"
#include "json.hpp"

namespace blockframe::cli {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using text::format_double;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = ".";
  std::string format = "json";
  std::string catalog;
};

class Context {
 public:
  Context(const Globals& g, std::ostream& out, std::ostream& err, std::string config_hash)
      : g_(g), out_(out), err_(err), hash_(std::move(config_hash)) {}

  const Globals& globals() const { return g_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  bool csv() const { return g_.format == "csv"; }

  fs::path path(const std::string& name) const {
    fs::create_directories(g_.out_dir);
    return fs::path(g_.out_dir) / name;
  }

  std::string stamp() const {
    return std::string("blockframe ") + kVersion + " config_hash=" + hash_ + " seed=" + std::to_string(g_.seed);
  }

  json meta() const {
    json m;
    m["toolkit"] = "blockframe";
    m["version"] = kVersion;
    m["config_hash"] = hash_;
    m["seed"] = g_.seed;
    return m;
  }

  void write(const std::string& name, const std::string& body) {
    const fs::path p = path(name);
    const fs::path tmp = p.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + p.string());
      f << body;
      if (!f) throw ValidationError("failed writing " + p.string());
    }
    fs::rename(tmp, p);
    written_.push_back(p.string());
  }

  void write_json(const std::string& name, json body) {
    json doc;
    doc["meta"] = meta();
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(name, doc.dump(2) + "\n");
  }

  void write_csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    std::string body = "# " + stamp() + "\n" + header + "\n";
    for (const std::string& r : rows) body += r + "\n";
    write(name, body);
  }

  void report_written() {
    for (const std::string& p : written_) out_ << "wrote " << p << "\n";
  }

 private:
  Globals g_;
  std::ostream& out_;
  std::ostream& err_;
  std::string hash_;
  std::vector<std::string> written_;
};

std::string catalog_path(const Globals& g) {
  return g.catalog.empty() ? default_catalog_path().string() : g.catalog;
}

FrameSpec spec_from_entry(const CatalogEntry& e, const BlockModel& blocks) {
  return FrameSpec{e.base, e.difference_set.order, static_cast<int>(e.difference_set.elements.size()),
                   e.difference_set.elements, identity_permutation(e.difference_set.order), blocks};
}

// "catalog:NAME" builds the canonical frame of a catalog entry; anything
// else is a frame file path.
Frame resolve_frame(const std::string& source, const BlockModel& blocks, const Globals& g) {
  constexpr std::string_view kPrefix = "catalog:";
  if (source.rfind(kPrefix, 0) == 0) {
    const auto entries = load_catalog(catalog_path(g));
    return construct_frame(spec_from_entry(find_entry(entries, source.substr(kPrefix.size())), blocks));
  }
  Frame frame = load_frame(source, blocks.active_blocks);
  if (static_cast<int>(frame.n()) != blocks.total_columns())
    throw ValidationError(source + ": frame has N=" + std::to_string(frame.n()) + " but --blocks gives N=" +
                          std::to_string(blocks.total_columns()));
  return frame.blocks() == blocks ? frame : frame.with_blocks(blocks);
}

EvaluationMode evaluation_mode(std::uint64_t samples, bool monte_carlo, std::uint64_t seed) {
  EvaluationMode mode;
  mode.samples = samples;
  mode.seed = seed;
  mode.force_monte_carlo = monte_carlo;
  return mode;
}

std::vector<double> parse_double_list(const std::string& s, std::string_view what) {
  std::vector<double> out;
  for (std::string_view item : text::split(s, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(text::parse_double(item, what));
  }
  return out;
}

std::vector<double> parse_sweep(const std::string& s) {
  const auto parts = text::split(s, ':');
  if (parts.size() != 3) throw ValidationError("--snr-sweep expects start:stop:step, got '" + s + "'");
  const double a = text::parse_double(parts[0], "sweep start");
  const double b = text::parse_double(parts[1], "sweep stop");
  const double step = text::parse_double(parts[2], "sweep step");
  if (!(step > 0.0) || b < a) throw ValidationError("--snr-sweep needs step > 0 and stop >= start");
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 10000) throw ValidationError("--snr-sweep has too many points");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

json spec_json(const FrameSpec& s) {
  json j;
  j["base"] = std::string(to_string(s.base));
  j["N"] = s.n;
  j["M"] = s.m;
  j["blocks"] = s.blocks.to_string();
  j["rows"] = s.rows;
  j["perm"] = s.permutation;
  return j;
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string set;
  std::string rows;
  int n = 0;
  std::string base;
  std::string perm;
  bool one_based = false;
  std::string blocks;
  std::string output = "frame.txt";
};

int cmd_construct(Context& ctx, const ConstructArgs& a) {
  const BlockModel blocks = BlockModel::parse(a.blocks);
  FrameSpec spec;
  if (!a.set.empty() == !a.rows.empty()) throw ValidationError("construct: give exactly one of --set or --rows");
  if (!a.set.empty()) {
    const auto entries = load_catalog(catalog_path(ctx.globals()));
    spec = spec_from_entry(find_entry(entries, a.set), blocks);
    if (!a.base.empty() && parse_base_kind(a.base) != spec.base)
      throw ValidationError("construct: --base " + a.base + " conflicts with the entry's " +
                            std::string(to_string(spec.base)) + " base");
  } else {
    if (a.base.empty()) throw ValidationError("construct: --rows needs --base");
    spec.base = parse_base_kind(a.base);
    spec.rows = text::parse_int_list(a.rows, "rows");
    spec.n = a.n > 0 ? a.n : blocks.total_columns();
    spec.m = static_cast<int>(spec.rows.size());
    spec.permutation = identity_permutation(spec.n);
    spec.blocks = blocks;
  }
  if (!a.perm.empty()) {
    spec.permutation = text::parse_int_list(a.perm, "perm");
    if (a.one_based)
      for (int& p : spec.permutation) --p;
  }
  const Frame frame = construct_frame(spec);
  ctx.write(a.output, format_frame(frame, ctx.stamp()));

  const auto corr = squared_correlation_matrix(frame);
  const WelchBounds wb = welch_bounds(spec.n, spec.m);
  double sum = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      sum += corr(i, j);
      lo = std::min(lo, corr(i, j));
      hi = std::max(hi, corr(i, j));
    }
  const double mean = spec.n > 1 ? sum / (static_cast<double>(spec.n) * (spec.n - 1)) : 0.0;
  const Tightness t = tightness(frame);
  const bool etf = t.is_untf && std::abs(hi - wb.epsilon_wb) <= 1e-8 && std::abs(lo - wb.epsilon_wb) <= 1e-8;

  auto& out = ctx.out();
  out << "frame: base=" << to_string(spec.base) << " N=" << spec.n << " M=" << spec.m
      << " blocks=" << blocks.to_string() << "\n";
  out << "welch_bound: " << format_double(wb.average_bound) << "\n";
  out << "mean_sq_corr: " << format_double(mean) << "\n";
  out << "max_sq_corr: " << format_double(hi) << "\n";
  out << "min_sq_corr: " << format_double(lo) << "\n";
  out << "tight: " << (t.is_tight ? "yes" : "no") << " (A=" << format_double(t.a) << ", B=" << format_double(t.b)
      << ")\n";
  out << "untf: " << (t.is_untf ? "yes" : "no") << "\n";
  out << "etf: " << (etf ? "yes" : "no") << "\n";
  ctx.report_written();
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> frames;
  std::vector<std::string> series;
  std::string blocks;
  double snr_db = 30.0;
  std::string snr_sweep;
  std::string outage = "0.98";
  std::uint64_t samples = 10000;
  bool monte_carlo = false;
  bool per_selection = false;
  bool references = true;
  bool gnuplot = false;
};

struct SeriesInput {
  std::string label;
  std::vector<std::string> sources;
};

std::vector<SeriesInput> collect_series(const EvalArgs& a) {
  std::vector<SeriesInput> out;
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    out.push_back({a.frames.size() == 1 ? "frame" : "frame" + std::to_string(i), {a.frames[i]}});
  for (const std::string& s : a.series) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
      throw ValidationError("--series expects LABEL=SOURCE[,SOURCE...], got '" + s + "'");
    SeriesInput in{s.substr(0, eq), {}};
    for (std::string_view src : text::split(std::string_view(s).substr(eq + 1), ',')) {
      src = text::trim(src);
      if (!src.empty()) in.sources.emplace_back(src);
    }
    out.push_back(std::move(in));
  }
  if (out.empty()) throw ValidationError("eval: give --frame or --series");
  std::set<std::string> labels;
  for (const auto& s : out)
    if (!labels.insert(s.label).second) throw ValidationError("eval: duplicate series label '" + s.label + "'");
  return out;
}

int cmd_eval(Context& ctx, const EvalArgs& a) {
  const BlockModel blocks = BlockModel::parse(a.blocks);
  const std::vector<double> snrs = a.snr_sweep.empty() ? std::vector<double>{a.snr_db} : parse_sweep(a.snr_sweep);
  const std::vector<double> fractions = parse_double_list(a.outage, "outage fraction");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ValidationError("outage fractions must lie in (0, 1]");
  const EvaluationMode mode = evaluation_mode(a.samples, a.monte_carlo, ctx.globals().seed);
  const auto series = collect_series(a);
  const int k = blocks.active_columns();
  const int n = blocks.total_columns();

  std::string outage_header;
  for (double f : fractions) outage_header += ",outage_" + format_double(f);
  std::vector<std::string> capacity_rows, stc_rows;
  // x is the SNR in dB for a sweep, otherwise beta^-1.
  const bool sweep = snrs.size() > 1;
  std::vector<std::string> capacity_curve, outage_curve, stc_curve;
  auto curve_x = [&](double beta_inv, double snr_db) { return format_double(sweep ? snr_db : beta_inv); };
  json series_json = json::array();
  std::set<int> ms;

  for (const SeriesInput& s : series) {
    json sj;
    sj["label"] = s.label;
    sj["points"] = json::array();
    for (const std::string& source : s.sources) {
      const Frame frame = resolve_frame(source, blocks, ctx.globals());
      const int m = static_cast<int>(frame.m());
      ms.insert(m);
      const double beta_inv = static_cast<double>(m) / k;
      const bool stc_ok = k >= m;
      if (!stc_ok)
        warn(s.label + " " + source + ": STC bound skipped because K=" + std::to_string(k) + " < M=" +
             std::to_string(m));
      json pj;
      pj["source"] = source;
      pj["M"] = m;
      pj["K"] = k;
      pj["beta_inv"] = beta_inv;
      pj["gamma"] = static_cast<double>(m) / n;
      pj["results"] = json::array();
      for (double snr_db : snrs) {
        const ChannelParams channel = ChannelParams::from_db(snr_db);
        const CapacityReport cap = average_capacity(frame, channel, mode, fractions);
        json rj;
        rj["snr_db"] = snr_db;
        rj["capacity"] = cap.mean;
        rj["orthogonality_bound"] = cap.orthogonality_bound;
        json outage;
        std::string row = s.label + "," + source + "," + std::to_string(m) + "," + std::to_string(k) + "," +
                          format_double(beta_inv) + "," + format_double(snr_db) + "," + format_double(cap.mean) +
                          "," + format_double(cap.orthogonality_bound);
        for (double f : fractions) {
          outage[format_double(f)] = cap.outage.at(f);
          row += "," + format_double(cap.outage.at(f));
        }
        rj["outage"] = outage;
        capacity_rows.push_back(row);
        const std::string x = curve_x(beta_inv, snr_db);
        capacity_curve.push_back(x + "," + s.label + "," + format_double(cap.mean));
        for (double f : fractions)
          outage_curve.push_back(x + "," + s.label + (fractions.size() > 1 ? "@" + format_double(f) : "") + "," +
                                 format_double(cap.outage.at(f)));
        if (stc_ok) {
          const StcReport stc = stc_error_bound(frame, channel, mode);
          rj["stc_bound"] = stc.bound_mean;
          rj["stc_orthogonality_bound"] = stc.orthogonality_bound;
          stc_rows.push_back(s.label + "," + source + "," + std::to_string(m) + "," + std::to_string(k) + "," +
                             format_double(snr_db) + "," + format_double(stc.bound_mean) + "," +
                             format_double(stc.orthogonality_bound));
          stc_curve.push_back(x + "," + s.label + "," + format_double(stc.bound_mean));
        }
        if (a.per_selection) {
          json per = json::array();
          for (const SelectionValue& v : cap.per_selection)
            per.push_back(json{{"selection", v.selection.to_string()}, {"capacity", v.value}});
          rj["per_selection"] = per;
        }
        ctx.out() << s.label << " " << source << " M=" << m << " K=" << k << " snr_db=" << format_double(snr_db)
                  << " capacity=" << format_double(cap.mean);
        for (double f : fractions) ctx.out() << " outage@" << format_double(f) << "=" << format_double(cap.outage.at(f));
        if (stc_ok) ctx.out() << " stc_bound=" << format_double(rj["stc_bound"].get<double>());
        ctx.out() << "\n";
        pj["results"].push_back(rj);
      }
      sj["points"].push_back(pj);
    }
    series_json.push_back(sj);
  }

  json refs = json::array();
  if (a.references) {
    for (int m : ms) {
      const double beta = static_cast<double>(k) / m;
      const double gamma = static_cast<double>(m) / n;
      if (m > n) continue;
      for (double snr_db : snrs) {
        const double snr = ChannelParams::from_db(snr_db).snr_linear();
        auto g = [snr](double x) { return std::log2(1.0 + snr * x); };
        const std::pair<const char*, SpectralModel> models[] = {{"manova", SpectralModel::manova(beta, gamma)},
                                                                {"mp", SpectralModel::marchenko_pastur(beta)}};
        for (const auto& [name, model] : models) {
          const double value = k * model.expectation(g);
          refs.push_back(json{{"model", name}, {"M", m}, {"K", k}, {"beta_inv", 1.0 / beta}, {"snr_db", snr_db},
                              {"capacity", value}});
          std::string row = std::string(name) + ",-," + std::to_string(m) + "," + std::to_string(k) + "," +
                            format_double(1.0 / beta) + "," + format_double(snr_db) + "," + format_double(value) +
                            "," + format_double(capacity_orthogonality_bound(k, ChannelParams::from_db(snr_db)));
          for (std::size_t i = 0; i < fractions.size(); ++i) row += ",";
          capacity_rows.push_back(row);
          capacity_curve.push_back(curve_x(1.0 / beta, snr_db) + "," + name + "," + format_double(value));
        }
      }
    }
  }

  if (ctx.csv()) {
    ctx.write_csv("capacity.csv", "series,source,M,K,beta_inv,snr_db,capacity,orthogonality_bound" + outage_header,
                  capacity_rows);
    if (!stc_rows.empty())
      ctx.write_csv("stc.csv", "series,source,M,K,snr_db,bound_mean,orthogonality_bound", stc_rows);
    const std::string x_name = sweep ? "snr_db" : "beta_inv";
    ctx.write_csv("capacity_curve.csv", x_name + ",series,value", capacity_curve);
    ctx.write_csv("outage_curve.csv", x_name + ",series,value", outage_curve);
    if (!stc_curve.empty()) ctx.write_csv("stc_curve.csv", x_name + ",series,value", stc_curve);
    if (a.gnuplot) {
      std::vector<std::string> labels;
      for (const auto& sr : series) labels.push_back(sr.label);
      std::ostringstream gp;
      gp << "# " << ctx.stamp() << "\n"
         << "set datafile separator ','\nset key left top\n"
         << "set xlabel '" << (sweep ? "SNR [dB]" : "beta^{-1}") << "'\n";
      auto plot = [&](const std::string& file, const std::vector<std::string>& names) {
        gp << "plot";
        for (std::size_t i = 0; i < names.size(); ++i)
          gp << (i ? "," : "") << " '" << file << "' using (strcol(2) eq '" << names[i]
             << "' ? $1 : 1/0):3 with linespoints title '" << names[i] << "'";
        gp << "\n";
      };
      if (sweep && !stc_curve.empty()) {
        gp << "set logscale y\nset ylabel 'error probability bound'\n";
        plot("stc_curve.csv", labels);
      } else {
        gp << "set ylabel 'average capacity [bits]'\n";
        if (a.references) labels.insert(labels.end(), {"manova", "mp"});
        plot("capacity_curve.csv", labels);
      }
      ctx.write(sweep && !stc_curve.empty() ? "stc.gp" : "capacity.gp", gp.str());
    }
  } else {
    json body;
    body["blocks"] = blocks.to_string();
    body["snr_db"] = snrs;
    body["evaluation"] = uses_enumeration(blocks, mode) ? "exhaustive" : "monte_carlo";
    body["series"] = series_json;
    body["references"] = refs;
    ctx.write_json("eval.json", body);
  }
  ctx.report_written();
  return 0;
}

// ----------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string frame;
  std::string blocks;
  int bins = 50;
  double upper = 0.0;
  std::uint64_t samples = 10000;
  bool monte_carlo = false;
};

int cmd_spectrum(Context& ctx, const SpectrumArgs& a) {
  const BlockModel blocks = BlockModel::parse(a.blocks);
  if (a.bins < 1) throw ValidationError("--bins must be at least 1");
  if (a.bins == 1) warn("a single histogram bin makes the KL divergence trivially zero");
  const Frame frame = resolve_frame(a.frame, blocks, ctx.globals());
  const EvaluationMode mode = evaluation_mode(a.samples, a.monte_carlo, ctx.globals().seed);
  const int m = static_cast<int>(frame.m());
  const Ratios r = ratios(blocks, m);
  const SpectralModel manova = SpectralModel::manova(r.beta, r.gamma).smaller_side();
  const SpectralModel mp = SpectralModel::marchenko_pastur(r.beta).smaller_side();

  EmpiricalSpectrum spectrum = empirical_spectrum(frame, mode, a.bins);
  const double upper = a.upper > 0.0 ? a.upper : reference_histogram_upper(spectrum, manova);
  spectrum.histogram = make_histogram(spectrum, a.bins, upper);
  const double kl_manova = kl_divergence(spectrum, manova);
  const double kl_mp = kl_divergence(spectrum, mp);

  std::vector<std::string> eig_rows;
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
    eig_rows.push_back(std::to_string(i / spectrum.rank) + "," + std::to_string(i % spectrum.rank) + "," +
                       format_double(spectrum.eigenvalues[i]));
  ctx.write_csv("spectrum.csv", "selection_id,eig_index,lambda", eig_rows);

  std::vector<std::string> hist_rows;
  const Histogram& h = spectrum.histogram;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const bool last = b + 1 == h.bins();
    hist_rows.push_back(format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," +
                        format_double(h.masses[b]) + "," +
                        format_double(manova.bin_probability(h.edges[b], h.edges[b + 1], last)) + "," +
                        format_double(mp.bin_probability(h.edges[b], h.edges[b + 1], last)));
  }
  ctx.write_csv("histogram.csv", "bin_left,bin_right,mass,manova_mass,mp_mass", hist_rows);

  std::vector<std::string> selection_rows;
  for (std::size_t i = 0; i < spectrum.selections.size(); ++i)
    selection_rows.push_back(std::to_string(i) + ",\"" + spectrum.selections[i].to_string() + "\"");
  ctx.write_csv("selections.csv", "selection_id,active_blocks", selection_rows);

  if (ctx.csv()) {
    ctx.write_csv("kl.csv", "model,kl", {"manova," + format_double(kl_manova), "mp," + format_double(kl_mp)});
  } else {
    json body;
    body["blocks"] = blocks.to_string();
    body["M"] = m;
    body["beta"] = r.beta;
    body["gamma"] = r.gamma;
    body["bins"] = a.bins;
    body["upper"] = upper;
    body["selections"] = spectrum.selections.size();
    body["kl"] = json{{"manova", kl_manova}, {"mp", kl_mp}};
    ctx.write_json("kl.json", body);
  }
  ctx.out() << "beta=" << format_double(r.beta) << " gamma=" << format_double(r.gamma)
            << " selections=" << spectrum.selections.size() << "\n";
  ctx.out() << "kl_manova=" << format_double(kl_manova) << "\n";
  ctx.out() << "kl_mp=" << format_double(kl_mp) << "\n";
  ctx.report_written();
  return 0;
}

// ------------------------------------------------------------------- search

struct SearchArgs {
  std::string kind = "petf";
  std::string base;
  std::string set;
  int m = 0;
  std::string blocks;
  double snr_db = 30.0;
  std::string mode = "stochastic";
  int restarts = 4;
  int iters = 2000;
  std::string neighborhood = "both";
  double temperature = 1.0;
  double cooling = 0.995;
  int descent_passes = 4;
  std::uint64_t exhaustive_cap = 10'000'000;
  std::uint64_t samples = 10000;
  std::string checkpoint = "checkpoint.json";
  bool resume = false;
  std::string output = "best.frame";
};

json outcome_json(const RestartOutcome& r) {
  json j;
  j["restart"] = r.restart;
  j["best_objective"] = r.best_objective;
  j["evaluations"] = r.evaluations;
  j["rows"] = r.best_spec.rows;
  j["perm"] = r.best_spec.permutation;
  json trace = json::array();
  for (const TracePoint& t : r.trace) trace.push_back(json::array({t.iteration, t.objective}));
  j["trace"] = trace;
  return j;
}

RestartOutcome outcome_from_json(const json& j, const FrameSpec& shape) {
  RestartOutcome r;
  r.restart = j.at("restart").get<int>();
  r.best_objective = j.at("best_objective").get<double>();
  r.evaluations = j.at("evaluations").get<std::uint64_t>();
  r.best_spec = shape;
  r.best_spec.rows = j.at("rows").get<std::vector<int>>();
  r.best_spec.permutation = j.at("perm").get<std::vector<int>>();
  r.best_spec.validate();
  for (const json& t : j.at("trace")) r.trace.push_back({t.at(0).get<std::uint64_t>(), t.at(1).get<double>()});
  return r;
}

int cmd_search(Context& ctx, const SearchArgs& a, const std::string& config_hash) {
  const BlockModel blocks = BlockModel::parse(a.blocks);
  SearchConfig config;
  config.channel = ChannelParams::from_db(a.snr_db);
  config.mode = parse_search_mode(a.mode);
  config.stochastic.restarts = a.restarts;
  config.stochastic.iterations_per_restart = a.iters;
  config.stochastic.seed = ctx.globals().seed;
  config.stochastic.neighborhood = parse_neighborhood(a.neighborhood);
  config.stochastic.initial_temperature = a.temperature;
  config.stochastic.cooling = a.cooling;
  config.stochastic.descent_passes = a.descent_passes;
  config.exhaustive_cap = a.exhaustive_cap;
  config.evaluation = evaluation_mode(a.samples, false, ctx.globals().seed);
  if (!(a.temperature > 0.0) || !(a.cooling > 0.0 && a.cooling <= 1.0))
    throw ValidationError("search: need --temperature > 0 and --cooling in (0, 1]");

  std::optional<CatalogEntry> entry;
  if (!a.set.empty()) entry = find_entry(load_catalog(catalog_path(ctx.globals())), a.set);
  BaseKind base = entry ? entry->base : BaseKind::Hadamard;
  if (!a.base.empty()) base = parse_base_kind(a.base);
  if (entry && entry->base != base) throw ValidationError("search: --base conflicts with the catalog entry");
  const int n = blocks.total_columns();
  if (entry && entry->difference_set.order != n)
    throw ValidationError("search: entry " + entry->name + " has N=" + std::to_string(entry->difference_set.order) +
                          " but --blocks gives N=" + std::to_string(n));

  int m = a.m;
  if (entry) {
    const int em = static_cast<int>(entry->difference_set.elements.size());
    if (m != 0 && m != em) throw ValidationError("search: --m conflicts with the catalog entry");
    m = em;
  }
  if (m < 1) throw ValidationError("search: give --set or --m");
  const FrameSpec shape{base, n, m, identity_permutation(m), identity_permutation(n), blocks};

  SearchHooks hooks;
  const fs::path checkpoint_path = ctx.path(a.checkpoint);
  if (a.resume && fs::exists(checkpoint_path)) {
    std::ifstream in(checkpoint_path);
    json cp;
    try {
      cp = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(checkpoint_path.string() + ": " + e.what());
    }
    if (cp.value("config_hash", std::string()) != config_hash)
      throw ValidationError(checkpoint_path.string() + ": checkpoint belongs to a different configuration");
    try {
      for (const json& r : cp.at("restart_states")) hooks.completed.push_back(outcome_from_json(r, shape));
    } catch (const json::exception& e) {
      throw ValidationError(checkpoint_path.string() + ": " + e.what());
    }
    ctx.out() << "resuming with " << hooks.completed.size() << " completed restart(s)\n";
  }

  std::map<int, RestartOutcome> finished;
  for (const RestartOutcome& r : hooks.completed) finished[r.restart] = r;
  auto save_checkpoint = [&]() {
    json body;
    body["config_hash"] = config_hash;
    body["restart_states"] = json::array();
    const RestartOutcome* best = nullptr;
    for (const auto& [idx, r] : finished) {
      body["restart_states"].push_back(outcome_json(r));
      if (!best || r.best_objective > best->best_objective) best = &r;
    }
    if (best) {
      body["best_spec"] = spec_json(best->best_spec);
      body["best_objective"] = best->best_objective;
    }
    ctx.write_json(a.checkpoint, body);
  };
  hooks.on_restart = [&](const RestartOutcome& r) {
    finished[r.restart] = r;
    save_checkpoint();
  };

  SearchResult result;
  if (a.kind == "petf") {
    if (!entry) throw ValidationError("search: petf needs --set (a difference set)");
    config.row_set_policy = RowSetPolicy::Fixed;
    result = search_petf(base, entry->difference_set, blocks, config, &hooks);
  } else if (a.kind == "butf") {
    config.row_set_policy = RowSetPolicy::Free;
    if (entry) config.initial_specs.push_back(spec_from_entry(*entry, blocks));
    result = search_butf(base, blocks, m, config, &hooks);
  } else {
    throw ValidationError("search: --kind must be petf or butf");
  }

  const Frame best = construct_frame(result.best_spec);
  ctx.write(a.output, format_frame(best, ctx.stamp()));
  std::vector<std::string> trace_rows;
  for (const TracePoint& t : result.trace)
    trace_rows.push_back(std::to_string(t.iteration) + "," + format_double(t.objective));
  ctx.write_csv("trace.csv", "iteration,objective", trace_rows);

  json body;
  body["kind"] = a.kind;
  body["mode"] = a.mode;
  body["snr_db"] = a.snr_db;
  body["best_objective"] = result.best_objective;
  body["evaluations"] = result.evaluations;
  body["best_spec"] = spec_json(result.best_spec);
  json restarts = json::array();
  for (const RestartOutcome& r : result.restarts)
    restarts.push_back(json{{"restart", r.restart}, {"best_objective", r.best_objective}, {"evaluations", r.evaluations}});
  body["restarts"] = restarts;
  ctx.write_json("search.json", body);

  ctx.out() << "best_objective=" << format_double(result.best_objective) << "\n";
  ctx.out() << "evaluations=" << result.evaluations << "\n";
  ctx.out() << "rows=" << text::join(result.best_spec.rows) << "\n";
  ctx.out() << "perm=" << text::join(result.best_spec.permutation) << "\n";
  ctx.report_written();
  return 0;
}

// ------------------------------------------------------------------ catalog

struct CatalogArgs {
  std::string group = "binary";
  std::string base = "hadamard";
  int n = 16;
  int m = 6;
  int restarts = 8;
  int iters = 20000;
  std::string name;
};

int cmd_catalog_list(Context& ctx) {
  const auto entries = load_catalog(catalog_path(ctx.globals()));
  for (const CatalogEntry& e : entries) {
    ctx.out() << e.name << " base=" << to_string(e.base) << " N=" << e.difference_set.order
              << " M=" << e.difference_set.elements.size();
    if (e.almost)
      ctx.out() << " almost max_sq_corr=" << format_double(e.max_sq_corr);
    else
      ctx.out() << " lambda=" << e.difference_set.lambda;
    ctx.out() << "\n";
  }
  return 0;
}

int cmd_catalog_verify(Context& ctx) {
  const auto entries = load_catalog(catalog_path(ctx.globals()));
  bool all_ok = true;
  for (const CatalogEntry& e : entries) {
    const int n = e.difference_set.order;
    const int m = static_cast<int>(e.difference_set.elements.size());
    const Frame frame = construct_frame(spec_from_entry(e, BlockModel{1, n, 1}));
    const auto corr = squared_correlation_matrix(frame);
    const WelchBounds wb = welch_bounds(n, m);
    double sum = 0.0, worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        sum += corr(i, j);
        worst = std::max(worst, std::abs(corr(i, j) - wb.epsilon_wb));
      }
    const double mean = sum / (static_cast<double>(n) * (n - 1));
    const bool untf = tightness(frame).is_untf;
    const bool welch_ok = !untf || std::abs(mean - wb.average_bound) <= 1e-8;
    const bool etf_ok = e.almost || worst <= 1e-8;
    const bool ok = welch_ok && etf_ok;
    all_ok = all_ok && ok;
    ctx.out() << (ok ? "PASS " : "FAIL ") << e.name << (e.almost ? " (almost)" : "")
              << " welch_mean_gap=" << format_double(mean - wb.average_bound)
              << " etf_max_dev=" << format_double(worst) << "\n";
  }
  if (!all_ok) throw ValidationError("catalog verification failed");
  return 0;
}

int cmd_catalog_find(Context& ctx, const CatalogArgs& a) {
  const DifferenceSetSearch r = find_difference_sets(parse_group_kind(a.group), a.n, a.m);
  if (r.reason) {
    ctx.out() << "none: " << *r.reason << "\n";
    return 0;
  }
  for (const auto& s : r.sets) ctx.out() << text::join(s) << "\n";
  ctx.out() << r.sets.size() << " set(s) up to translation\n";
  return 0;
}

int cmd_catalog_almost(Context& ctx, const CatalogArgs& a) {
  const BaseKind base = parse_base_kind(a.base);
  AlmostSearchOptions opt;
  opt.seed = ctx.globals().seed;
  opt.restarts = a.restarts;
  opt.iterations = a.iters;
  const AlmostSet s = find_almost_set(base, a.n, a.m, opt);
  CatalogEntry e;
  e.name = a.name.empty() ? std::string(to_string(base)) + "-" + std::to_string(a.n) + "-" + std::to_string(a.m) + "-almost"
                          : a.name;
  e.base = base;
  e.difference_set = DifferenceSet{group_for(base), a.n, s.elements, 0};
  e.almost = true;
  e.max_sq_corr = s.max_sq_corr;
  e.provenance = "local search: seed=" + std::to_string(opt.seed) + " restarts=" + std::to_string(opt.restarts) +
                 " iterations=" + std::to_string(opt.iterations);
  e.notes = "welch bound " + format_double(welch_bounds(a.n, a.m).epsilon_wb);
  ctx.out() << catalog_to_json({e});
  return 0;
}

// ---------------------------------------------------------------- dispatch

const std::set<std::string> kUnhashed{"out-dir", "threads", "config", "resume", "checkpoint", "output", "help"};

void hash_options(const CLI::App& scope, bool globals_only, std::string& canonical) {
  for (const CLI::Option* opt : scope.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || kUnhashed.count(name)) continue;
    if (globals_only && name != "seed" && name != "format" && name != "catalog") continue;
    canonical += name + "=";
    for (const std::string& r : opt->reduced_results()) canonical += r + ";";
    if (opt->count() == 0) canonical += "<default>" + opt->get_default_str();
    canonical += "\n";
  }
}

// Hash of everything that shapes the outputs: the command path and its
// resolved options, plus the global seed, format and catalog.
std::string config_hash(const CLI::App& app, const CLI::App& sub) {
  std::string canonical;
  hash_options(app, true, canonical);
  const CLI::App* scope = &sub;
  while (scope) {
    canonical += "[" + scope->get_name() + "]\n";
    hash_options(*scope, false, canonical);
    const CLI::App* next = nullptr;
    for (const CLI::App* s : scope->get_subcommands())
      if (s->parsed()) next = s;
    scope = next;
  }
  return hex64(fnv1a(canonical));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-erasure frame design toolkit", "blockframe"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--catalog", g.catalog, "Catalog file (default: bundled catalog)");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Build a frame from a row set and permutation");
  construct->add_option("--set", ca.set, "Catalog entry name");
  construct->add_option("--rows", ca.rows, "Row set, comma separated");
  construct->add_option("--n", ca.n, "Base size N (default from --blocks)");
  construct->add_option("--base", ca.base, "dft or hadamard");
  construct->add_option("--perm", ca.perm, "Column permutation, comma separated");
  construct->add_flag("--one-based", ca.one_based, "Permutation entries start at 1");
  construct->add_option("--blocks", ca.blocks, "NB:NV:NA")->required();
  construct->add_option("-o,--output", ca.output, "Frame file name inside --out-dir")->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Capacity, outage and STC bound reports");
  eval->add_option("--frame", ea.frames, "Frame source: file path or catalog:NAME");
  eval->add_option("--series", ea.series, "LABEL=SOURCE[,SOURCE...]");
  eval->add_option("--blocks", ea.blocks, "NB:NV:NA")->required();
  eval->add_option("--snr-db", ea.snr_db, "SNR in dB")->capture_default_str();
  eval->add_option("--snr-sweep", ea.snr_sweep, "start:stop:step in dB");
  eval->add_option("--outage", ea.outage, "Rate fractions for outage, comma separated")->capture_default_str();
  eval->add_option("--samples", ea.samples, "Monte Carlo selections")->capture_default_str();
  eval->add_flag("--monte-carlo", ea.monte_carlo, "Sample selections even when enumeration is cheap");
  eval->add_flag("--per-selection", ea.per_selection, "Include per-selection capacities (JSON)");
  eval->add_flag("!--no-references", ea.references, "Skip the MANOVA/MP reference curves");
  eval->add_flag("--gnuplot", ea.gnuplot, "Also write a gnuplot script (CSV format)");

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "Empirical subframe spectra and KL divergence");
  spectrum->add_option("--frame", sa.frame, "Frame source: file path or catalog:NAME")->required();
  spectrum->add_option("--blocks", sa.blocks, "NB:NV:NA")->required();
  spectrum->add_option("--bins", sa.bins, "Histogram bins")->capture_default_str();
  spectrum->add_option("--upper", sa.upper, "Histogram upper edge (default from the MANOVA support)");
  spectrum->add_option("--samples", sa.samples, "Monte Carlo selections")->capture_default_str();
  spectrum->add_flag("--monte-carlo", sa.monte_carlo, "Sample selections even when enumeration is cheap");

  SearchArgs ra;
  auto* search = app.add_subcommand("search", "PETF/BUTF search for capacity-maximizing frames");
  search->add_option("--kind", ra.kind, "petf or butf")->check(CLI::IsMember({"petf", "butf"}))->capture_default_str();
  search->add_option("--base", ra.base, "dft or hadamard");
  search->add_option("--set", ra.set, "Catalog entry (PETF row set, BUTF starting point)");
  search->add_option("--m", ra.m, "Rows M (BUTF without --set)");
  search->add_option("--blocks", ra.blocks, "NB:NV:NA")->required();
  search->add_option("--snr-db", ra.snr_db, "SNR in dB")->capture_default_str();
  search->add_option("--mode", ra.mode, "exhaustive or stochastic")->capture_default_str();
  search->add_option("--restarts", ra.restarts, "Annealing restarts")->capture_default_str();
  search->add_option("--iters", ra.iters, "Iterations per restart")->capture_default_str();
  search->add_option("--neighborhood", ra.neighborhood, "column, row or both")->capture_default_str();
  search->add_option("--temperature", ra.temperature, "Initial temperature in bits")->capture_default_str();
  search->add_option("--cooling", ra.cooling, "Geometric cooling ratio per iteration")->capture_default_str();
  search->add_option("--descent-passes", ra.descent_passes, "Final descent passes")->capture_default_str();
  search->add_option("--exhaustive-cap", ra.exhaustive_cap, "Largest exhaustive search space")->capture_default_str();
  search->add_option("--samples", ra.samples, "Monte Carlo selections for huge erasure patterns")->capture_default_str();
  search->add_option("--checkpoint", ra.checkpoint, "Checkpoint file inside --out-dir")->capture_default_str();
  search->add_flag("--resume", ra.resume, "Reuse finished restarts from the checkpoint");
  search->add_option("-o,--output", ra.output, "Best frame file inside --out-dir")->capture_default_str();

  CatalogArgs cat;
  auto* catalog = app.add_subcommand("catalog", "Difference-set catalog tools");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List catalog entries");
  auto* verify = catalog->add_subcommand("verify", "Re-validate entries and check ETF structure");
  auto* find = catalog->add_subcommand("find", "Exhaustive difference-set search");
  find->add_option("--group", cat.group, "cyclic or binary")->capture_default_str();
  find->add_option("--n", cat.n, "Group order")->capture_default_str();
  find->add_option("--m", cat.m, "Set size")->capture_default_str();
  auto* almost = catalog->add_subcommand("almost", "Local search for a near-ETF row set");
  almost->add_option("--base", cat.base, "dft or hadamard")->capture_default_str();
  almost->add_option("--n", cat.n, "Base size")->capture_default_str();
  almost->add_option("--m", cat.m, "Rows")->capture_default_str();
  almost->add_option("--restarts", cat.restarts, "Restarts")->capture_default_str();
  almost->add_option("--iters", cat.iters, "Iterations per restart")->capture_default_str();
  almost->add_option("--name", cat.name, "Entry name");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ErrorKind::Validation);
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx(g, out, err, config_hash(app, *sub));
  if (g.threads > 0) set_worker_count(g.threads);

  if (sub == construct) return cmd_construct(ctx, ca);
  if (sub == eval) return cmd_eval(ctx, ea);
  if (sub == spectrum) return cmd_spectrum(ctx, sa);
  if (sub == search) return cmd_search(ctx, ra, config_hash(app, *sub));
  if (list->parsed()) return cmd_catalog_list(ctx);
  if (verify->parsed()) return cmd_catalog_verify(ctx);
  if (find->parsed()) return cmd_catalog_find(ctx, cat);
  if (almost->parsed()) return cmd_catalog_almost(ctx, cat);
  return static_cast<int>(ErrorKind::Validation);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const WarningSink previous = set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << "\n"; });
  const int workers = worker_count();
  int code = 0;
  try {
    code = dispatch(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    code = static_cast<int>(ErrorKind::Validation);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  set_worker_count(workers);
  set_warning_sink(previous);
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace blockframe::cli
