#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include "ldbc/dynamics.hpp"
#include "ldbc/edges.hpp"
#include "ldbc/io.hpp"
#include "ldbc/propagate.hpp"
#include "ldbc/render.hpp"
#include "ldbc/sample_orbits.hpp"
#include "ldbc/survey.hpp"
#include "ldbc/validate.hpp"

namespace ldbc::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  double mu = 3.226201e-7;
  double e_p = 0.093418;
  double a_p = 1.523688;
  double radius_km = 3397.0;
  double soi_factor = 170.0;
  IntegratorConfig integrator;
  std::size_t workers = 0;
  bool quiet = false;

  SystemParams params() const { return make_params(mu, e_p, a_p, radius_km, soi_factor); }

  SurveyOptions survey(std::ostream& err) const {
    SurveyOptions opt;
    if (workers > 0) opt.workers = workers;
    if (!quiet) {
      auto shared = std::make_shared<std::pair<std::mutex, std::size_t>>();
      opt.progress = [shared, &err](std::size_t done, std::size_t total) {
        const std::size_t pct = done * 100 / total;
        std::lock_guard lock(shared->first);
        if (pct > shared->second || done == total) {
          shared->second = pct;
          err << "\r  " << done << "/" << total << std::flush;
          if (done == total) err << "\n";
        }
      };
    }
    return opt;
  }
};

void add_physics(CLI::App* sub, Common& c) {
  sub->add_option("--mu", c.mu, "mass parameter")->capture_default_str();
  sub->add_option("--e-p", c.e_p, "eccentricity of the primaries")->capture_default_str();
  sub->add_option("--a-p", c.a_p, "semi-major axis of the primaries [AU]")->capture_default_str();
  sub->add_option("--radius-km", c.radius_km, "target body radius [km]")->capture_default_str();
  sub->add_option("--soi-factor", c.soi_factor, "sphere of influence in body radii")
      ->capture_default_str();
  sub->add_option("--rel-tol", c.integrator.rel_tol)->capture_default_str();
  sub->add_option("--abs-tol", c.integrator.abs_tol)->capture_default_str();
  sub->add_option("--h-max", c.integrator.h_max)->capture_default_str();
  sub->add_option("--max-steps", c.integrator.max_steps)->capture_default_str();
}

void add_workers(CLI::App* sub, Common& c) {
  sub->add_option("--workers", c.workers, "worker threads (default: LDBC_WORKERS or all cores)");
  sub->add_flag("--quiet", c.quiet, "no progress output");
}

struct GridArgs {
  double f0 = 0.0;
  double fb = 0.0;
  double ff = 0.0;
  std::size_t n = 500;
  double eps = 6e-4;
  double e0 = 0.9;
  double gamma = 0.5;

  SurveyRequest request() const { return {{eps, n}, f0, fb, ff, e0, gamma}; }
};

void add_grid(CLI::App* sub, GridArgs& g) {
  sub->add_option("--f0", g.f0, "initial true anomaly")->capture_default_str();
  sub->add_option("--fb", g.fb, "backward extent (<= 0)")->capture_default_str();
  sub->add_option("--ff", g.ff, "forward extent (>= 0)")->capture_default_str();
  sub->add_option("--n", g.n, "grid points per side")->capture_default_str();
  sub->add_option("--eps", g.eps, "grid half-width")->capture_default_str();
  sub->add_option("--e0", g.e0, "osculating eccentricity at periapsis")->capture_default_str();
  sub->add_option("--gamma", g.gamma, "descriptor exponent")->capture_default_str();
}

std::string describe(const LabelField& l) {
  std::size_t counts[5] = {};
  for (Label v : l.labels) ++counts[static_cast<int>(v)];
  std::ostringstream s;
  for (int c = 0; c < 5; ++c)
    s << (c ? " " : "") << to_string(static_cast<Label>(c)) << "=" << counts[c];
  return s.str();
}

std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](auto v) { return v != 0; }));
}

void require_same_system(const io::Header& a, const io::Header& b) {
  if (!(a.grid == b.grid)) throw ShapeError("grid mismatch between input files");
  if (a.f0 != b.f0) throw ShapeError("f0 mismatch between input files");
  if (a.mu != b.mu || a.e_p != b.e_p) throw ShapeError("system parameters differ between input files");
}

// ---- field ----------------------------------------------------------------

struct FieldCmd {
  Common common;
  GridArgs grid;
  std::string out, backward_out, forward_out, csv, image;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("field", "Lagrangian-descriptor field M(f0, fB, fF) on a grid");
    add_grid(sub, grid);
    add_physics(sub, common);
    add_workers(sub, common);
    sub->add_option("--out", out, "output .bcf file")->required();
    sub->add_option("--backward-out", backward_out, "also write the backward leg");
    sub->add_option("--forward-out", forward_out, "also write the forward leg");
    sub->add_option("--csv", csv, "also write i,j,X,Y,value rows");
    sub->add_option("--image", image, "also write a grayscale .png/.pgm");
  }

  int exec(std::ostream& out_s, std::ostream& err) {
    const SystemParams p = common.params();
    common.integrator.validate();
    const SurveyRequest req = grid.request();
    const LdFields ld = compute_ld_field(req, common.integrator, p, common.survey(err));
    io::write_bcf(out, io::from_field(ld.total, p));
    if (!backward_out.empty()) io::write_bcf(backward_out, io::from_field(ld.backward, p));
    if (!forward_out.empty()) io::write_bcf(forward_out, io::from_field(ld.forward, p));
    if (!csv.empty()) {
      std::ostringstream s;
      s << std::setprecision(17) << "i,j,X,Y,value\n";
      for (std::size_t i = 0; i < req.grid.n; ++i)
        for (std::size_t j = 0; j < req.grid.n; ++j) {
          const Offset o = req.grid.offset(i, j);
          s << i << "," << j << "," << o.X << "," << o.Y << "," << ld.total.values(i, j) << "\n";
        }
      io::write_atomic(csv, s.str());
    }
    if (!image.empty()) render::write_image(image, render::field_image(ld.total));
    std::size_t errors = 0;
    for (double v : ld.total.values) errors += !std::isfinite(v);
    out_s << "wrote " << out << " (" << req.grid.n << "x" << req.grid.n << ", " << errors
          << " failed points)\n";
    return kOk;
  }
};

// ---- classify -------------------------------------------------------------

fs::path events_path_for(const fs::path& labels) {
  fs::path p = labels;
  p.replace_extension(".events.bcf");
  return p;
}

struct ClassifyCmd {
  Common common;
  GridArgs grid;
  std::string out, events, image;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("classify", "stability labels over [f0, f0+fb] or [f0, f0+ff]");
    add_grid(sub, grid);
    add_physics(sub, common);
    add_workers(sub, common);
    sub->add_option("--out", out, "output label .bcf file")->required();
    sub->add_option("--events", events, "event-anomaly file (default: <out>.events.bcf)");
    sub->add_option("--image", image, "also write a palette .png/.ppm");
  }

  int exec(std::ostream& out_s, std::ostream& err) {
    if ((grid.fb != 0.0) == (grid.ff != 0.0))
      throw ParameterError("fb", "exactly one of --fb and --ff must be non-zero");
    const SystemParams p = common.params();
    common.integrator.validate();
    const Direction dir = grid.fb != 0.0 ? Direction::Backward : Direction::Forward;
    const LabelField l =
        compute_label_field(grid.request(), dir, common.integrator, p, common.survey(err));
    io::write_bcf(out, io::from_labels(l, grid.gamma, p));
    const fs::path ev = events.empty() ? events_path_for(out) : fs::path(events);
    io::write_bcf(ev, io::events_of(l, grid.gamma, p));
    if (!image.empty()) render::write_image(image, render::labels_image(l));
    out_s << "wrote " << out << " and " << ev.string() << ": " << describe(l) << "\n";
    return kOk;
  }
};

// ---- capture --------------------------------------------------------------

struct CaptureCmd {
  std::string back, fwd, out, image;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("capture", "capture set: backward unstable and forward weakly stable");
    sub->add_option("--back", back, "backward label file")->required();
    sub->add_option("--fwd", fwd, "forward label file")->required();
    sub->add_option("--out", out, "output mask .bcf file")->required();
    sub->add_option("--image", image, "also write an image of the mask");
  }

  int exec(std::ostream& out_s, std::ostream&) {
    const io::BcfFile b = io::read_bcf(back);
    const io::BcfFile f = io::read_bcf(fwd);
    io::expect_kind(b, io::Kind::Labels);
    io::expect_kind(f, io::Kind::Labels);
    if (!(b.header.fB < 0.0)) throw ParameterError("back", "not a backward label file");
    if (!(f.header.fF > 0.0)) throw ParameterError("fwd", "not a forward label file");
    require_same_system(b.header, f.header);
    const Mask c = capture_set(io::to_labels(b), io::to_labels(f));
    io::Header h = b.header;
    h.fF = f.header.fF;
    io::write_bcf(out, io::from_mask(h, c, io::Kind::Mask));
    if (!image.empty()) {
      render::Image img = render::labels_image(io::to_labels(f));
      render::write_image(image, render::overlay(std::move(img), c, render::kHighlight));
    }
    out_s << "wrote " << out << ": " << count_set(c) << " captured points\n";
    return kOk;
  }
};

// ---- edges ----------------------------------------------------------------

struct EdgesCmd {
  std::string in, out, image;
  double sigma = 0.0;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("edges", "separatrices of a field by thresholded Roberts cross");
    sub->add_option("--in", in, "input field file")->required();
    sub->add_option("--sigma", sigma, "threshold on the normalized field")->required();
    sub->add_option("--out", out, "output edge file (default: <in>.edges.bcf)");
    sub->add_option("--image", image, "also write an image of the edges");
  }

  int exec(std::ostream& out_s, std::ostream&) {
    const io::BcfFile f = io::read_bcf(in);
    const EdgeMap e = extract_separatrices(io::to_field(f), sigma);
    fs::path dest = out;
    if (out.empty()) {
      dest = in;
      dest.replace_extension(".edges.bcf");
    }
    io::write_bcf(dest, io::from_edges(e, f.header));
    if (!image.empty()) render::write_image(image, render::mask_image(e.mask, render::kBlack));
    out_s << "wrote " << dest.string() << ": " << count_set(e.mask) << " edge pixels at sigma "
          << sigma << "\n";
    return kOk;
  }
};

// ---- validate -------------------------------------------------------------

struct ValidateCmd {
  std::string edges, labels, json;
  int d = 2;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("validate", "agreement of edges with label-set boundaries");
    sub->add_option("--edges", edges, "edge file")->required();
    sub->add_option("--labels", labels, "label file over the same interval")->required();
    sub->add_option("--d", d, "pixel tolerance (Chebyshev)")->capture_default_str();
    sub->add_option("--json", json, "also write the metrics as JSON");
  }

  int exec(std::ostream& out_s, std::ostream&) {
    const io::BcfFile ef = io::read_bcf(edges);
    const io::BcfFile lf = io::read_bcf(labels);
    io::expect_kind(lf, io::Kind::Labels);
    if (!(ef.header.grid == lf.header.grid)) throw ShapeError("grid mismatch between edges and labels");
    const LabelField l = io::to_labels(lf);
    const Mask boundary = class_boundaries(l);
    const Mask e = without_errors(io::to_mask(ef), l);
    const Agreement a = agreement(e, boundary, d);
    const Mask disk = central_disk_boundary(l, boundary);
    const Agreement ad = agreement(e, disk, d);

    nlohmann::json j;
    j["d"] = d;
    j["precision"] = a.precision;
    j["recall"] = a.recall;
    j["median_distance"] = std::isnan(a.median_distance) ? nlohmann::json(nullptr)
                                                         : nlohmann::json(a.median_distance);
    j["edge_pixels"] = a.edge_pixels;
    j["boundary_pixels"] = a.boundary_pixels;
    j["disk_recall"] = ad.recall;
    j["disk_boundary_pixels"] = ad.boundary_pixels;
    if (ef.header.sigma) j["sigma"] = *ef.header.sigma;
    if (!json.empty()) io::write_atomic(json, j.dump(2) + "\n");

    out_s << std::setprecision(4) << "precision " << a.precision << "  recall " << a.recall
          << "  median " << a.median_distance << "  (d = " << d << ", " << a.edge_pixels
          << " edge / " << a.boundary_pixels << " boundary pixels)\n"
          << "disk recall " << ad.recall << " over " << ad.boundary_pixels << " pixels\n";
    return kOk;
  }
};

// ---- orbit ----------------------------------------------------------------

struct OrbitCmd {
  Common common;
  std::string ic, out;
  std::optional<double> x0, y0;
  double f0 = 0.0, e0 = 0.9, fb = 0.0, ff = 0.0, gamma = 0.5;
  double step = kTwoPi / 1000.0;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("orbit", "trajectory of one initial condition in both frames");
    auto* named = sub->add_option("--ic", ic, "sample orbit a..l");
    auto* ox = sub->add_option("--x0", x0, "offset X from the target");
    auto* oy = sub->add_option("--y0", y0, "offset Y from the target");
    named->excludes(ox)->excludes(oy);
    ox->needs(oy);
    oy->needs(ox);
    sub->add_option("--f0", f0)->capture_default_str();
    sub->add_option("--e0", e0)->capture_default_str();
    sub->add_option("--fb", fb, "backward extent (<= 0)")->capture_default_str();
    sub->add_option("--ff", ff, "forward extent (>= 0)")->capture_default_str();
    sub->add_option("--gamma", gamma)->capture_default_str();
    sub->add_option("--step", step, "output sampling in true anomaly")->capture_default_str();
    sub->add_option("--out", out, "CSV output (default: stdout)");
    add_physics(sub, common);
  }

  int exec(std::ostream& out_s, std::ostream& err) {
    Offset offset;
    if (!ic.empty()) {
      const auto s = find_sample_orbit(ic);
      if (!s) throw ParameterError("ic", "unknown sample orbit '" + ic + "'");
      offset = s->offset;
    } else if (x0 && y0) {
      offset = {*x0, *y0};
    } else {
      throw ParameterError("ic", "give --ic or --x0/--y0");
    }
    if (!(fb <= 0.0)) throw ParameterError("fb", "must be <= 0");
    if (!(ff >= 0.0)) throw ParameterError("ff", "must be >= 0");
    if (fb == 0.0 && ff == 0.0) throw ParameterError("ff", "one of --fb/--ff must be non-zero");
    if (!(step > 0.0)) throw ParameterError("step", "must be positive");
    if (!(e0 >= 0.0 && e0 < 1.0)) throw ParameterError("e0", "must satisfy 0 <= e0 < 1");
    const SystemParams p = common.params();
    common.integrator.validate();
    const SynodicState s0 = generate_ic(offset, f0, e0, p);

    std::ostringstream csv;
    csv << std::setprecision(17) << "leg,f,x,y,xp,yp,X,Y,VX,VY,r,H,ld\n";
    std::ostringstream summary;
    auto leg = [&](const char* name, double extent) {
      if (extent == 0.0) return;
      PropagateOptions opt;
      opt.gamma = gamma;
      opt.sample_step = step;
      opt.observer = [&](const SynodicState& s, double ld) {
        const RelativeState r = to_mars_relative(s, f0, p);
        csv << name << "," << s.f << "," << s.x << "," << s.y << "," << s.xp << "," << s.yp << ","
            << r.X << "," << r.Y << "," << r.VX << "," << r.VY << "," << r.radius() << ","
            << kepler_energy(r, p) << "," << ld << "\n";
      };
      const PropagationOutcome o = propagate(s0, f0 + extent, common.integrator, p, opt);
      const Classification c = classification_of(o);
      summary << name << ": " << to_string(o.terminal) << " at f = " << o.f_end << ", label "
              << to_string(c.label) << ", LD = " << o.ld << "\n";
    };
    leg("backward", fb);
    leg("forward", ff);

    if (out.empty()) {
      out_s << csv.str();
      err << summary.str();
    } else {
      io::write_atomic(out, csv.str());
      out_s << summary.str();
    }
    return kOk;
  }
};

// ---- render ---------------------------------------------------------------

struct RenderCmd {
  std::string in, out, edges, capture;
  double clip_lo = 2.0, clip_hi = 98.0;

  void setup(CLI::App& app) {
    auto* sub = app.add_subcommand("render", "draw any .bcf file as PNG/PGM/PPM");
    sub->add_option("--in", in, "input .bcf file")->required();
    sub->add_option("--out", out, "output image (.png, .pgm or .ppm)")->required();
    sub->add_option("--edges", edges, "edge file drawn in black on top");
    sub->add_option("--capture", capture, "capture mask highlighted on top");
    sub->add_option("--clip-lo", clip_lo, "lower display percentile for fields")->capture_default_str();
    sub->add_option("--clip-hi", clip_hi, "upper display percentile for fields")->capture_default_str();
  }

  int exec(std::ostream& out_s, std::ostream&) {
    if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 100.0))
      throw ParameterError("clip-lo", "need 0 <= clip-lo < clip-hi <= 100");
    const io::BcfFile f = io::read_bcf(in);
    render::Image img(0, 0, true);
    switch (f.header.kind) {
      case io::Kind::Field: img = render::field_image(io::to_field(f), clip_lo, clip_hi); break;
      case io::Kind::Labels: img = render::labels_image(io::to_labels(f)); break;
      case io::Kind::Edges: img = render::mask_image(io::to_mask(f), render::kBlack); break;
      case io::Kind::Mask: img = render::mask_image(io::to_mask(f), render::kHighlight); break;
    }
    auto layer = [&](const std::string& path, render::Rgb color) {
      if (path.empty()) return;
      const io::BcfFile m = io::read_bcf(path);
      if (!(m.header.grid == f.header.grid)) throw ShapeError("grid mismatch with " + path);
      img = render::overlay(std::move(img), io::to_mask(m), color);
    };
    layer(capture, render::kHighlight);
    layer(edges, render::kBlack);
    render::write_image(out, img);
    out_s << "wrote " << out << "\n";
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagrangian descriptors and ballistic capture in the elliptic restricted three-body problem"};
  app.name("ldbc");
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1);

  FieldCmd field;
  ClassifyCmd classify;
  CaptureCmd capture;
  EdgesCmd edges;
  ValidateCmd validate;
  OrbitCmd orbit;
  RenderCmd render_cmd;
  field.setup(app);
  classify.setup(app);
  capture.setup(app);
  edges.setup(app);
  validate.setup(app);
  orbit.setup(app);
  render_cmd.setup(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "ldbc 1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "field") return field.exec(out, err);
    if (name == "classify") return classify.exec(out, err);
    if (name == "capture") return capture.exec(out, err);
    if (name == "edges") return edges.exec(out, err);
    if (name == "validate") return validate.exec(out, err);
    if (name == "orbit") return orbit.exec(out, err);
    if (name == "render") return render_cmd.exec(out, err);
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: invalid " << e.what() << "\n";
    return kUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace ldbc::cli
