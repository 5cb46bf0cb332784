#include <gridsight/pipeline.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <gridsight/canny.hpp>
#include <gridsight/gabor.hpp>
#include <gridsight/image_io.hpp>
#include <gridsight/structure.hpp>
#include <gridsight/version.hpp>

namespace gridsight {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("config: boolean expected for " + key + ", got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument("trailing");
        }
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: number expected for " + key + ", got '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const int i = std::stoi(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument("trailing");
        }
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: integer expected for " + key + ", got '" + v + "'");
    }
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(parse_double(item, key));
        }
    }
    if (out.empty()) {
        throw ConfigError("config: list expected for " + key);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += fmt(vs[i]);
    }
    return out;
}

json box_json(int x, int y, int w, int h) { return json::array({x, y, w, h}); }

} // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "seed") {
        seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "jobs") {
        jobs = parse_int(value, key);
    } else if (key == "pipeline.input") {
        input_dir = value;
    } else if (key == "pipeline.thermal_input") {
        thermal_input = value;
    } else if (key == "pipeline.out") {
        out_dir = value;
    } else if (key == "pipeline.model") {
        model_path = value;
    } else if (key == "pipeline.structures") {
        structures_enabled = parse_bool(value, key);
    } else if (key == "pipeline.clearance") {
        clearance_enabled = parse_bool(value, key);
    } else if (key == "pipeline.propose") {
        propose_enabled = parse_bool(value, key);
    } else if (key == "pipeline.classify") {
        classify_enabled = parse_bool(value, key);
    } else if (key == "image.meter_per_pixel") {
        meter_per_pixel = parse_double(value, key);
    } else if (key == "thermal.center_included") {
        thermal.center_included = parse_bool(value, key);
    } else if (key == "thermal.edge_threshold") {
        thermal.edge_threshold = parse_double(value, key);
    } else if (key == "canny.sigma") {
        clearance.canny_sigma = parse_double(value, key);
    } else if (key == "canny.low") {
        clearance.canny_low = parse_double(value, key);
    } else if (key == "canny.high") {
        clearance.canny_high = parse_double(value, key);
    } else if (key == "hough.rho_res") {
        clearance.rho_res = parse_double(value, key);
    } else if (key == "hough.theta_res") {
        clearance.theta_res = parse_double(value, key);
    } else if (key == "hough.min_votes") {
        clearance.min_votes = parse_int(value, key);
    } else if (key == "lines.vertical_half_window") {
        clearance.vertical_half_window_deg = parse_double(value, key);
    } else if (key == "lines.diag_center") {
        clearance.diag_center_deg = parse_double(value, key);
    } else if (key == "lines.diag_half_window") {
        clearance.diag_half_window_deg = parse_double(value, key);
    } else if (key == "facade.n_points") {
        facade_points = parse_int(value, key);
    } else if (key == "facade.measure_height_frac") {
        clearance.measure_height_frac = parse_double(value, key);
    } else if (key == "green.gr_th") {
        green.gr_th = parse_int(value, key);
    } else if (key == "green.min_th") {
        green.min_th = parse_int(value, key);
    } else if (key == "green.max_th") {
        green.max_th = parse_int(value, key);
    } else if (key == "gabor.orients") {
        gabor_orients = parse_int(value, key);
    } else if (key == "gabor.waves") {
        gabor_waves = parse_double_list(value, key);
    } else if (key == "gabor.xy_scale") {
        gabor_xy_scale = parse_double(value, key);
    } else if (key == "structures.tower_threshold") {
        tower_threshold = value == "auto" ? -1.0 : parse_double(value, key);
    } else if (key == "proposal.wavelet") {
        if (value == "haar") {
            proposal.wavelet = Wavelet::Haar;
        } else if (value == "db2") {
            proposal.wavelet = Wavelet::Db2;
        } else {
            throw ConfigError("config: proposal.wavelet must be haar or db2");
        }
    } else if (key == "proposal.e_max") {
        proposal.e_max = parse_double(value, key);
    } else if (key == "proposal.max_regions") {
        proposal.max_regions = parse_int(value, key);
    } else if (key == "proposal.max_radius") {
        proposal.max_radius = parse_int(value, key);
    } else if (key == "proposal.plateau_eps") {
        proposal.entropy_plateau_eps = parse_double(value, key);
    } else if (key == "proposal.plateau_steps") {
        proposal.plateau_steps = parse_int(value, key);
    } else if (key == "proposal.min_region_px") {
        proposal.min_region_px = parse_int(value, key);
    } else if (key == "train.lr") {
        train_lr = parse_double(value, key);
    } else if (key == "train.epochs") {
        train_epochs = parse_int(value, key);
    } else if (key == "train.batch") {
        train_batch = parse_int(value, key);
    } else if (key == "train.momentum") {
        train_momentum = parse_double(value, key);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

std::map<std::string, std::string> PipelineConfig::echo() const {
    std::map<std::string, std::string> kv;
    kv["seed"] = std::to_string(seed);
    kv["jobs"] = std::to_string(jobs);
    kv["pipeline.input"] = input_dir;
    kv["pipeline.thermal_input"] = thermal_input;
    kv["pipeline.out"] = out_dir;
    kv["pipeline.model"] = model_path;
    kv["pipeline.structures"] = structures_enabled ? "true" : "false";
    kv["pipeline.clearance"] = clearance_enabled ? "true" : "false";
    kv["pipeline.propose"] = propose_enabled ? "true" : "false";
    kv["pipeline.classify"] = classify_enabled ? "true" : "false";
    kv["image.meter_per_pixel"] = fmt(meter_per_pixel);
    kv["thermal.center_included"] = thermal.center_included ? "true" : "false";
    kv["thermal.edge_threshold"] = fmt(thermal.edge_threshold);
    kv["canny.sigma"] = fmt(clearance.canny_sigma);
    kv["canny.low"] = fmt(clearance.canny_low);
    kv["canny.high"] = fmt(clearance.canny_high);
    kv["hough.rho_res"] = fmt(clearance.rho_res);
    kv["hough.theta_res"] = fmt(clearance.theta_res);
    kv["hough.min_votes"] = std::to_string(clearance.min_votes);
    kv["lines.vertical_half_window"] = fmt(clearance.vertical_half_window_deg);
    kv["lines.diag_center"] = fmt(clearance.diag_center_deg);
    kv["lines.diag_half_window"] = fmt(clearance.diag_half_window_deg);
    kv["facade.n_points"] = std::to_string(facade_points);
    kv["facade.measure_height_frac"] = fmt(clearance.measure_height_frac);
    kv["green.gr_th"] = std::to_string(green.gr_th);
    kv["green.min_th"] = std::to_string(green.min_th);
    kv["green.max_th"] = std::to_string(green.max_th);
    kv["gabor.orients"] = std::to_string(gabor_orients);
    kv["gabor.waves"] = fmt_list(gabor_waves);
    kv["gabor.xy_scale"] = fmt(gabor_xy_scale);
    kv["structures.tower_threshold"] = tower_threshold < 0.0 ? "auto" : fmt(tower_threshold);
    kv["proposal.wavelet"] = proposal.wavelet == Wavelet::Haar ? "haar" : "db2";
    kv["proposal.e_max"] = fmt(proposal.e_max);
    kv["proposal.max_regions"] = std::to_string(proposal.max_regions);
    kv["proposal.max_radius"] = std::to_string(proposal.max_radius);
    kv["proposal.plateau_eps"] = fmt(proposal.entropy_plateau_eps);
    kv["proposal.plateau_steps"] = std::to_string(proposal.plateau_steps);
    kv["proposal.min_region_px"] = std::to_string(proposal.min_region_px);
    kv["train.lr"] = fmt(train_lr);
    kv["train.epochs"] = std::to_string(train_epochs);
    kv["train.batch"] = std::to_string(train_batch);
    kv["train.momentum"] = fmt(train_momentum);
    return kv;
}

void PipelineConfig::validate_for_pipeline() const {
    if (jobs < 1) {
        throw ConfigError("config: jobs must be at least 1");
    }
    if (input_dir.empty()) {
        throw ConfigError("config: pipeline.input is required");
    }
    if (!fs::exists(input_dir)) {
        throw ConfigError("config: input directory does not exist: " + input_dir);
    }
    if (!thermal_input.empty() && !fs::exists(thermal_input)) {
        throw ConfigError("config: thermal input does not exist: " + thermal_input);
    }
    if (classify_enabled) {
        if (model_path.empty()) {
            throw ConfigError("config: classification enabled but pipeline.model not set");
        }
        if (!fs::exists(model_path)) {
            throw ConfigError("config: model file does not exist: " + model_path);
        }
    }
    proposal.validate();
    FacadeConfig fc{facade_points, meter_per_pixel};
    fc.validate();
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFileError("cannot open config file: " + path);
    }
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: missing '=' at " + path + ":" + std::to_string(line_no));
        }
        cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON encoders
// ---------------------------------------------------------------------------

json to_json(const HoughLine& line) {
    return json{{"rho", line.rho}, {"theta_deg", line.theta_deg}, {"votes", line.votes}};
}

json to_json(const ClearanceReport& report) {
    json sides = json::array();
    for (const ClearanceSide& side : report.sides) {
        json segs = json::array();
        for (const FacadeSegment& s : side.segments) {
            segs.push_back(json{{"x", s.x}, {"y0", s.y0}, {"y1", s.y1}});
        }
        sides.push_back(json{{"side", side.side},
                             {"upper", to_json(side.upper)},
                             {"lower", to_json(side.lower)},
                             {"segments", segs},
                             {"distance_m", side.distance_m}});
    }
    json towers = json::array();
    for (const HoughLine& l : report.tower_lines) {
        towers.push_back(to_json(l));
    }
    return json{{"tower_lines", towers}, {"sides", sides}, {"green_fraction", report.green_fraction}};
}

json to_json(const ProposalRegion& region) {
    return json{{"bbox", box_json(region.x, region.y, region.w, region.h)},
                {"subband", to_string(region.subband)},
                {"entropy", region.entropy},
                {"nfc_seed", region.nfc_seed}};
}

json to_json(const ClassifiedRegion& region) {
    json j = to_json(region.region);
    j["label"] = to_string(region.label);
    j["confidence"] = region.confidence;
    return j;
}

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

namespace {

std::string out_path(const PipelineConfig& cfg, const std::string& stem, const std::string& suffix) {
    return (fs::path(cfg.out_dir) / (stem + suffix)).string();
}

} // namespace

json thermal_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem) {
    const BitMask mask = extract_hotspots(img, cfg.thermal);
    const RasterGray exposed = expose_neighbor_edges(img, mask, cfg.thermal.edge_threshold);
    save_png(mask_to_gray(mask), out_path(cfg, stem, "_hotspots.png"));
    save_png(exposed, out_path(cfg, stem, "_exposed.png"));
    save_overlay(gray_to_rgb(img), {MaskAnnotation{mask, {255, 0, 0}}},
                 out_path(cfg, stem, "_overlay.png"));

    json comps = json::array();
    for (const MaskComponent& c : mask_components(mask)) {
        comps.push_back(json{{"bbox", box_json(c.x, c.y, c.w, c.h)}, {"pixels", c.pixels}});
    }
    return json{{"hotspot_pixels", mask.count()}, {"components", comps}};
}

json structures_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem) {
    const BitMask edges = canny(img, cfg.clearance.canny_sigma, cfg.clearance.canny_low,
                                cfg.clearance.canny_high);
    const int min_votes = cfg.clearance.min_votes > 0
                              ? cfg.clearance.min_votes
                              : std::max(1, static_cast<int>(std::lround(0.3 * img.height)));
    const std::vector<HoughLine> lines =
        hough_lines(edges, cfg.clearance.rho_res, cfg.clearance.theta_res, min_votes);

    const GaborFeatureStack stack = gabor_bank(img, cfg.gabor_orients, cfg.gabor_waves, cfg.gabor_xy_scale);
    const PcaProjection pca = pca_project(stack);
    const BitMask towers = tower_mask(
        pca.image, cfg.tower_threshold < 0.0 ? std::nullopt : std::optional<double>(cfg.tower_threshold));
    const RasterGray confined = confine_transfer_lines(edges, towers);

    save_png(mask_to_gray(edges), out_path(cfg, stem, "_edges.png"));
    save_png(pca.image, out_path(cfg, stem, "_pc.png"));
    save_png(confined, out_path(cfg, stem, "_confined.png"));

    json jlines = json::array();
    for (const HoughLine& l : lines) {
        jlines.push_back(to_json(l));
    }
    std::ofstream lines_file(out_path(cfg, stem, "_lines.json"));
    lines_file << jlines.dump(2) << "\n";

    return json{{"edge_pixels", edges.count()}, {"lines", jlines}, {"tower_pixels", towers.count()}};
}

json clearance_stage(const PipelineConfig& cfg, const RasterRgb& img, const std::string& stem) {
    const FacadeConfig fc{cfg.facade_points, cfg.meter_per_pixel};
    const ClearanceReport report = clearance_report(img, fc, cfg.green, cfg.clearance);
    save_overlay(img, clearance_annotations(report, img.width, img.height, cfg.clearance.measure_height_frac),
                 out_path(cfg, stem, "_clearance.png"));
    return to_json(report);
}

json propose_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem,
                   std::vector<ProposalRegion>* regions_out) {
    const std::vector<ProposalRegion> regions = propose_regions(img, cfg.proposal);
    std::vector<Annotation> shapes;
    for (const ProposalRegion& r : regions) {
        const Rgb8 color = r.subband == DetailSubband::Vertical ? Rgb8{255, 0, 0} : Rgb8{255, 255, 0};
        shapes.push_back(BoxAnnotation{r.x, r.y, r.w, r.h, color});
    }
    save_overlay(gray_to_rgb(img), shapes, out_path(cfg, stem, "_proposals.png"));

    json jregions = json::array();
    for (const ProposalRegion& r : regions) {
        jregions.push_back(to_json(r));
    }
    std::ofstream file(out_path(cfg, stem, "_proposals.json"));
    file << jregions.dump(2) << "\n";
    if (regions_out) {
        *regions_out = regions;
    }
    return jregions;
}

json classify_stage(const CnnModel& model, const std::vector<ProposalRegion>& regions,
                    const RasterGray& img) {
    json out = json::array();
    for (const ClassifiedRegion& r : filter_proposals(model, regions, img)) {
        out.push_back(to_json(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// batch pipeline
// ---------------------------------------------------------------------------

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

std::vector<fs::path> list_images(const std::string& dir_or_file) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(dir_or_file)) {
        files.push_back(dir_or_file);
        return files;
    }
    for (const auto& entry : fs::directory_iterator(dir_or_file)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate_for_pipeline();
    fs::create_directories(cfg.out_dir);

    CnnModel model;
    if (cfg.classify_enabled) {
        model = load_model(cfg.model_path);
    }

    const std::vector<fs::path> files = list_images(cfg.input_dir);
    std::vector<json> entries(files.size());
    std::atomic<int> exit_code{0};
    std::atomic<std::size_t> next{0};

    auto process_one = [&](std::size_t idx) {
        const fs::path& file = files[idx];
        const std::string stem = file.stem().string();
        json entry;
        entry["name"] = file.filename().string();
        try {
            const RasterRgb rgb = load_image(file.string());
            const RasterGray gray = to_gray(rgb);
            if (cfg.structures_enabled) {
                entry["structures"] = structures_stage(cfg, gray, stem);
            }
            if (cfg.clearance_enabled) {
                try {
                    entry["clearance"] = clearance_stage(cfg, rgb, stem);
                } catch (const GeometryError& e) {
                    entry["clearance"] = json{{"error", e.what()}};
                    exit_code.store(2);
                }
            }
            std::vector<ProposalRegion> regions;
            if (cfg.propose_enabled) {
                entry["proposals"] = propose_stage(cfg, gray, stem, &regions);
            }
            if (cfg.classify_enabled) {
                entry["classified"] = classify_stage(model, regions, gray);
            }
        } catch (const Error& e) {
            entry["error"] = e.what();
            exit_code.store(2);
        }
        entries[idx] = std::move(entry);
    };

    const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(files.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < files.size(); ++i) {
            process_one(i);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
                    process_one(i);
                }
            });
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    json thermal_entries = json::array();
    if (!cfg.thermal_input.empty()) {
        for (const fs::path& file : list_images(cfg.thermal_input)) {
            json entry;
            entry["name"] = file.filename().string();
            try {
                const RasterGray gray = to_gray(load_image(file.string()));
                entry["thermal"] = thermal_stage(cfg, gray, file.stem().string());
            } catch (const Error& e) {
                entry["error"] = e.what();
                exit_code.store(2);
            }
            thermal_entries.push_back(std::move(entry));
        }
    }

    PipelineResult result;
    result.report["schema"] = kReportSchema;
    result.report["version"] = kVersion;
    result.report["config"] = cfg.echo();
    result.report["images"] = entries;
    result.report["thermal"] = thermal_entries;
    result.exit_code = exit_code.load();

    std::ofstream out(fs::path(cfg.out_dir) / "report.json");
    out << result.report.dump(2) << "\n";
    return result;
}

} // namespace gridsight
