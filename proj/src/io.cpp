#include "autolabel/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace autolabel {
namespace io {

using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view token, const fs::path& path, size_t line_no) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                         std::string(token) + "'");
    return v;
}

PointCloud load_cloud_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    PointCloud cloud;
    std::string line;
    size_t line_no = 0;
    std::vector<std::string> header;
    int cx = -1, cy = -1, cz = -1, cs = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string_view> tokens;
        size_t start = 0;
        while (start <= line.size()) {
            size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            tokens.emplace_back(line.data() + start, comma - start);
            start = comma + 1;
        }
        if (header.empty()) {
            for (size_t i = 0; i < tokens.size(); ++i) {
                header.emplace_back(tokens[i]);
                if (tokens[i] == "x") cx = int(i);
                if (tokens[i] == "y") cy = int(i);
                if (tokens[i] == "z") cz = int(i);
                if (tokens[i] == "score") cs = int(i);
            }
            if (cx < 0 || cy < 0 || cz < 0)
                throw ParseError(path.string() + ": CSV header must name x,y,z columns");
            continue;
        }
        if (tokens.size() != header.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": wrong column count");
        Point3 p{parse_double(tokens[cx], path, line_no), parse_double(tokens[cy], path, line_no),
                 parse_double(tokens[cz], path, line_no)};
        if (!p.finite())
            throw ValidationError(path.string() + ": non-finite point at index " +
                                  std::to_string(cloud.points.size()));
        cloud.points.push_back(p);
        if (cs >= 0) cloud.scores.push_back(parse_double(tokens[cs], path, line_no));
    }
    cloud.validate();
    return cloud;
}

}  // namespace

PointCloud load_cloud(const fs::path& path) {
    if (path.extension() == ".csv") return load_cloud_csv(path);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    size_t stride;
    if (bytes.size() % 12 == 0)
        stride = 12;
    else if (bytes.size() % 16 == 0)
        stride = 16;
    else
        throw ParseError(path.string() + ": trailing partial record at byte offset " +
                         std::to_string(bytes.size() - bytes.size() % 12));

    PointCloud cloud;
    const size_t n = bytes.size() / stride;
    cloud.points.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        float xyz[3];
        std::memcpy(xyz, bytes.data() + i * stride, sizeof(xyz));
        const Point3 p{double(xyz[0]), double(xyz[1]), double(xyz[2])};
        if (!p.finite())
            throw ValidationError(path.string() + ": non-finite point at index " +
                                  std::to_string(i));
        cloud.points.push_back(p);
    }
    return cloud;
}

void save_cloud(const fs::path& path, const PointCloud& cloud) {
    cloud.validate();
    std::string bytes;
    bytes.resize(cloud.size() * 12);
    for (size_t i = 0; i < cloud.size(); ++i) {
        const float xyz[3] = {float(cloud.points[i].x), float(cloud.points[i].y),
                              float(cloud.points[i].z)};
        std::memcpy(bytes.data() + i * 12, xyz, sizeof(xyz));
    }
    write_file_atomic(path, bytes);
}

void save_cloud_csv(const fs::path& path, const PointCloud& cloud) {
    cloud.validate();
    std::string out = cloud.has_scores() ? "x,y,z,score\n" : "x,y,z\n";
    for (size_t i = 0; i < cloud.size(); ++i) {
        out += fmt_double(cloud.points[i].x) + "," + fmt_double(cloud.points[i].y) + "," +
               fmt_double(cloud.points[i].z);
        if (cloud.has_scores()) out += "," + fmt_double(cloud.scores[i]);
        out += "\n";
    }
    write_file_atomic(path, out);
}

static json matrix4_json(const Pose& pose) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        json row = json::array();
        for (int c = 0; c < 3; ++c) row.push_back(pose.rotation(r, c));
        row.push_back(pose.translation(r));
        rows.push_back(row);
    }
    rows.push_back(json::array({0.0, 0.0, 0.0, 1.0}));
    return rows;
}

static Pose pose_from_matrix4(const json& rows, const std::string& where) {
    if (!rows.is_array() || rows.size() != 4) throw ParseError(where + ": expected a 4x4 matrix");
    Pose pose;
    for (int r = 0; r < 4; ++r) {
        const json& row = rows[r];
        if (!row.is_array() || row.size() != 4)
            throw ParseError(where + ": expected a 4x4 matrix");
        for (int c = 0; c < 4; ++c) {
            const double v = row[c].get<double>();
            if (r < 3 && c < 3)
                pose.rotation(r, c) = v;
            else if (r < 3)
                pose.translation(r) = v;
            else if ((c < 3 && v != 0.0) || (c == 3 && v != 1.0))
                throw ParseError(where + ": bottom row must be 0 0 0 1");
        }
    }
    pose.validate();
    return pose;
}

Pose load_pose(const fs::path& path) {
    const json j = parse_json(path);
    if (!j.contains("matrix")) throw ParseError(path.string() + ": missing 'matrix'");
    return pose_from_matrix4(j["matrix"], path.string());
}

void save_pose(const fs::path& path, const Pose& pose) {
    pose.validate();
    write_file_atomic(path, json{{"matrix", matrix4_json(pose)}}.dump(2) + "\n");
}

CameraModel load_camera(const fs::path& path) {
    const json j = parse_json(path);
    CameraModel cam;
    const json& k = j.at("intrinsic");
    if (!k.is_array() || k.size() != 9)
        throw ParseError(path.string() + ": intrinsic must have 9 row-major entries");
    for (int i = 0; i < 9; ++i) cam.intrinsic(i / 3, i % 3) = k[i].get<double>();
    cam.extrinsic = pose_from_matrix4(j.at("extrinsic"), path.string());
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.validate();
    return cam;
}

void save_camera(const fs::path& path, const CameraModel& camera) {
    camera.validate();
    json k = json::array();
    for (int i = 0; i < 9; ++i) k.push_back(camera.intrinsic(i / 3, i % 3));
    const json j{{"intrinsic", k},
                 {"extrinsic", matrix4_json(camera.extrinsic)},
                 {"width", camera.width},
                 {"height", camera.height}};
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<Mask2D> load_masks(const fs::path& path) {
    const json j = parse_json(path);
    const int w = j.at("image_w").get<int>();
    const int h = j.at("image_h").get<int>();
    std::vector<Mask2D> masks;
    for (const json& m : j.at("masks")) {
        Mask2D mask;
        mask.width = w;
        mask.height = h;
        const json& rle = m.at("rle");
        if (!rle.is_array() || rle.size() % 2 != 0)
            throw ParseError(path.string() + ": rle must hold start,len pairs");
        for (size_t i = 0; i < rle.size(); i += 2)
            mask.runs.emplace_back(rle[i].get<int64_t>(), rle[i + 1].get<int64_t>());
        if (m.contains("label")) mask.label = m["label"].get<std::string>();
        if (m.contains("confidence")) mask.confidence = m["confidence"].get<double>();
        mask.normalize();
        masks.push_back(std::move(mask));
    }
    return masks;
}

void save_masks(const fs::path& path, const std::vector<Mask2D>& masks, int image_w, int image_h) {
    json out{{"image_w", image_w}, {"image_h", image_h}, {"masks", json::array()}};
    for (const Mask2D& m : masks) {
        m.validate();
        if (m.width != image_w || m.height != image_h)
            throw ValidationError("mask dimensions disagree with the image");
        json rle = json::array();
        for (const auto& [start, len] : m.runs) {
            rle.push_back(start);
            rle.push_back(len);
        }
        out["masks"].push_back(
            {{"rle", rle}, {"label", m.label}, {"confidence", m.confidence}});
    }
    write_file_atomic(path, out.dump(2) + "\n");
}

std::vector<Label> load_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<Label> labels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("meta")) continue;
        Label l;
        l.frame = j.at("frame").get<std::string>();
        l.box.center = {j.at("cx").get<double>(), j.at("cy").get<double>(),
                        j.at("cz").get<double>()};
        l.box.length = j.at("l").get<double>();
        l.box.width = j.at("w").get<double>();
        l.box.height = j.at("h").get<double>();
        l.box.yaw = j.at("yaw").get<double>();
        l.source = label_source_from_string(j.at("source").get<std::string>());
        l.confidence = j.at("confidence").get<double>();
        l.validate();
        labels.push_back(std::move(l));
    }
    return labels;
}

static json label_to_json(const Label& l) {
    return json{{"frame", l.frame},
                {"cx", l.box.center.x},
                {"cy", l.box.center.y},
                {"cz", l.box.center.z},
                {"l", l.box.length},
                {"w", l.box.width},
                {"h", l.box.height},
                {"yaw", l.box.yaw},
                {"source", to_string(l.source)},
                {"confidence", l.confidence}};
}

void save_labels(const fs::path& path, const std::vector<Label>& labels, const json* meta) {
    std::string out;
    if (meta != nullptr) out += json{{"meta", *meta}}.dump() + "\n";
    for (const Label& l : labels) {
        l.validate();
        out += label_to_json(l).dump() + "\n";
    }
    write_file_atomic(path, out);
}

const ManifestFrame& Manifest::frame(const std::string& id) const {
    for (const ManifestFrame& f : frames)
        if (f.id == id) return f;
    throw ValidationError("manifest has no frame '" + id + "'");
}

std::vector<std::string> Manifest::group_of(const std::string& frame_id) const {
    for (const std::vector<std::string>& group : traversal_groups)
        for (const std::string& id : group)
            if (id == frame_id) return group;
    throw ValidationError("frame '" + frame_id + "' is not in any traversal group");
}

Manifest load_manifest(const fs::path& path) {
    const json j = parse_json(path);
    const fs::path root = path.parent_path();
    Manifest m;
    for (const json& f : j.at("frames")) {
        ManifestFrame mf;
        mf.id = f.at("id").get<std::string>();
        mf.location = f.value("location", "");
        mf.traversal = f.value("traversal", 0);
        mf.split = f.value("split", "train");
        mf.cloud = root / f.at("cloud").get<std::string>();
        mf.pose = root / f.at("pose").get<std::string>();
        mf.camera = root / f.at("camera").get<std::string>();
        mf.masks = root / f.at("masks").get<std::string>();
        if (f.contains("ground_truth"))
            mf.ground_truth = root / f.at("ground_truth").get<std::string>();
        for (const fs::path* p : {&mf.cloud, &mf.pose, &mf.camera, &mf.masks}) {
            if (!fs::exists(*p))
                throw ValidationError("manifest entry '" + mf.id + "': missing file " +
                                      p->string());
        }
        if (!mf.ground_truth.empty() && !fs::exists(mf.ground_truth))
            throw ValidationError("manifest entry '" + mf.id + "': missing file " +
                                  mf.ground_truth.string());
        m.frames.push_back(std::move(mf));
    }
    for (const json& g : j.at("traversal_groups")) {
        std::vector<std::string> group = g.get<std::vector<std::string>>();
        if (group.size() < 2)
            throw ValidationError("traversal groups need >= 2 members");
        for (const std::string& id : group) m.frame(id);  // must resolve
        m.traversal_groups.push_back(std::move(group));
    }
    return m;
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
    const fs::path root = path.parent_path();
    json frames = json::array();
    for (const ManifestFrame& f : manifest.frames) {
        json entry{{"id", f.id},
                   {"location", f.location},
                   {"traversal", f.traversal},
                   {"split", f.split},
                   {"cloud", fs::relative(f.cloud, root).generic_string()},
                   {"pose", fs::relative(f.pose, root).generic_string()},
                   {"camera", fs::relative(f.camera, root).generic_string()},
                   {"masks", fs::relative(f.masks, root).generic_string()}};
        if (!f.ground_truth.empty())
            entry["ground_truth"] = fs::relative(f.ground_truth, root).generic_string();
        frames.push_back(std::move(entry));
    }
    const json j{{"frames", frames}, {"traversal_groups", manifest.traversal_groups}};
    write_file_atomic(path, j.dump(2) + "\n");
}

Manifest write_dataset(const fs::path& root, const GeneratedScene& scene) {
    for (const char* dir : {"clouds", "poses", "cameras", "masks", "gt"})
        fs::create_directories(root / dir);

    Manifest manifest;
    for (const GeneratedFrame& frame : scene.frames) {
        ManifestFrame mf;
        mf.id = frame.id;
        mf.location = frame.location;
        mf.traversal = frame.traversal;
        mf.split = frame.heldout ? "test" : "train";
        mf.cloud = root / "clouds" / (frame.id + ".bin");
        mf.pose = root / "poses" / (frame.id + ".json");
        mf.camera = root / "cameras" / (frame.id + ".json");
        mf.masks = root / "masks" / (frame.id + ".json");
        mf.ground_truth = root / "gt" / (frame.id + ".jsonl");
        save_cloud(mf.cloud, frame.cloud_sensor);
        save_pose(mf.pose, frame.pose);
        save_camera(mf.camera, frame.camera);
        save_masks(mf.masks, frame.masks, frame.camera.width, frame.camera.height);
        save_labels(mf.ground_truth, frame.ground_truth);
        manifest.frames.push_back(std::move(mf));
    }
    for (const std::vector<int>& group : scene.traversal_groups) {
        std::vector<std::string> ids;
        for (int idx : group) ids.push_back(scene.frames[idx].id);
        manifest.traversal_groups.push_back(std::move(ids));
    }
    save_manifest(root / "manifest.json", manifest);
    return manifest;
}

static FitCriterion criterion_from_string(const std::string& s) {
    if (s == "closeness") return FitCriterion::closeness;
    if (s == "variance") return FitCriterion::variance;
    if (s == "area") return FitCriterion::area;
    throw ParseError("unknown fit criterion '" + s + "'");
}

static std::string criterion_to_string(FitCriterion c) {
    switch (c) {
        case FitCriterion::closeness: return "closeness";
        case FitCriterion::variance: return "variance";
        case FitCriterion::area: return "area";
    }
    throw ConfigError("unknown fit criterion");
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    if (j.contains("persistency")) {
        const json& p = j["persistency"];
        c.persistency.neighbor_radius = p.value("neighbor_radius", c.persistency.neighbor_radius);
        c.persistency.smoothing = p.value("smoothing", c.persistency.smoothing);
    }
    if (j.contains("clustering")) {
        const json& p = j["clustering"];
        c.clustering.radius = p.value("radius", c.clustering.radius);
        c.clustering.score_eps = p.value("score_eps", c.clustering.score_eps);
        c.clustering.min_pts = p.value("min_pts", c.clustering.min_pts);
        c.clustering.alpha = p.value("alpha", c.clustering.alpha);
        c.clustering.top_k_percent = p.value("top_k_percent", c.clustering.top_k_percent);
    }
    if (j.contains("boxfit")) {
        const json& p = j["boxfit"];
        if (p.contains("angle_step_deg"))
            c.boxfit.angle_step = p["angle_step_deg"].get<double>() * M_PI / 180.0;
        if (p.contains("criterion"))
            c.boxfit.criterion = criterion_from_string(p["criterion"].get<std::string>());
        c.boxfit.min_points = p.value("min_points", c.boxfit.min_points);
    }
    if (j.contains("lift")) {
        const json& p = j["lift"];
        c.lift.grow_radius = p.value("grow_radius", c.lift.grow_radius);
        c.lift.min_cluster = p.value("min_cluster", c.lift.min_cluster);
        c.lift.min_depth = p.value("min_depth", c.lift.min_depth);
    }
    if (j.contains("fusion")) {
        const json& p = j["fusion"];
        c.fusion.d_min = p.value("d_min", c.fusion.d_min);
        c.fusion_nms = p.value("nms", c.fusion_nms);
        c.fusion_nms_iou = p.value("nms_iou", c.fusion_nms_iou);
    }
    if (j.contains("selfpace")) {
        const json& p = j["selfpace"];
        c.selfpace.total_rounds = p.value("total_rounds", c.selfpace.total_rounds);
        c.selfpace.aggregation_start = p.value("aggregation_start", c.selfpace.aggregation_start);
        c.selfpace.lambda = p.value("lambda", c.selfpace.lambda);
        c.selfpace.adaptive_sampling = p.value("adaptive_sampling", c.selfpace.adaptive_sampling);
        if (p.contains("learner")) {
            const json& l = p["learner"];
            if (l.contains("initial_skills")) {
                const auto v = l["initial_skills"].get<std::vector<double>>();
                if (v.size() != 4) throw ConfigError("initial_skills needs 4 entries");
                std::copy(v.begin(), v.end(), c.learner.initial_skills.begin());
            }
            c.learner.learning_rate = l.value("learning_rate", c.learner.learning_rate);
            c.learner.saturation = l.value("saturation", c.learner.saturation);
            c.learner.pos_sigma = l.value("pos_sigma", c.learner.pos_sigma);
            c.learner.dim_sigma = l.value("dim_sigma", c.learner.dim_sigma);
            c.learner.yaw_sigma_deg = l.value("yaw_sigma_deg", c.learner.yaw_sigma_deg);
        }
    }
    if (j.contains("eval")) {
        const json& p = j["eval"];
        c.eval.iou_threshold = p.value("iou_threshold", c.eval.iou_threshold);
        c.eval.interpolation_points = p.value("interpolation_points", c.eval.interpolation_points);
        c.eval.bucket_by_gt = p.value("bucket_by_gt", c.eval.bucket_by_gt);
        if (p.contains("buckets")) {
            c.eval.buckets.clear();
            for (const json& b : p["buckets"])
                c.eval.buckets.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
        }
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    return c;
}

PipelineConfig load_config(const fs::path& path) { return config_from_json(parse_json(path)); }

json config_to_json(const PipelineConfig& c) {
    json learner{{"initial_skills", c.learner.initial_skills},
                 {"learning_rate", c.learner.learning_rate},
                 {"saturation", c.learner.saturation},
                 {"pos_sigma", c.learner.pos_sigma},
                 {"dim_sigma", c.learner.dim_sigma},
                 {"yaw_sigma_deg", c.learner.yaw_sigma_deg}};
    json buckets = json::array();
    for (const EvalBucket& b : c.eval.buckets) buckets.push_back(json::array({b.lo, b.hi}));
    return json{
        {"persistency",
         {{"neighbor_radius", c.persistency.neighbor_radius},
          {"smoothing", c.persistency.smoothing}}},
        {"clustering",
         {{"radius", c.clustering.radius},
          {"score_eps", c.clustering.score_eps},
          {"min_pts", c.clustering.min_pts},
          {"alpha", c.clustering.alpha},
          {"top_k_percent", c.clustering.top_k_percent}}},
        {"boxfit",
         {{"angle_step_deg", c.boxfit.angle_step * 180.0 / M_PI},
          {"criterion", criterion_to_string(c.boxfit.criterion)},
          {"min_points", c.boxfit.min_points}}},
        {"lift",
         {{"grow_radius", c.lift.grow_radius},
          {"min_cluster", c.lift.min_cluster},
          {"min_depth", c.lift.min_depth}}},
        {"fusion",
         {{"d_min", c.fusion.d_min}, {"nms", c.fusion_nms}, {"nms_iou", c.fusion_nms_iou}}},
        {"selfpace",
         {{"total_rounds", c.selfpace.total_rounds},
          {"aggregation_start", c.selfpace.aggregation_start},
          {"lambda", c.selfpace.lambda},
          {"adaptive_sampling", c.selfpace.adaptive_sampling},
          {"learner", learner}}},
        {"eval",
         {{"iou_threshold", c.eval.iou_threshold},
          {"interpolation_points", c.eval.interpolation_points},
          {"bucket_by_gt", c.eval.bucket_by_gt},
          {"buckets", buckets}}},
        {"seed", c.seed},
        {"threads", c.threads}};
}

json summary_to_json(const EvalSummary& summary) {
    json buckets = json::object();
    for (const BucketResult& b : summary.buckets) {
        json entry{{"num_gt", b.num_gt}, {"num_pred", b.num_pred}};
        entry["ap_bev"] = b.ap_bev ? json(*b.ap_bev) : json(nullptr);
        entry["ap_3d"] = b.ap_3d ? json(*b.ap_3d) : json(nullptr);
        buckets[b.bucket.name()] = std::move(entry);
    }
    json cfg{{"iou_threshold", summary.config.iou_threshold},
             {"interpolation_points", summary.config.interpolation_points},
             {"bucket_by_gt", summary.config.bucket_by_gt}};
    return json{{"buckets", buckets}, {"config", cfg}};
}

static json distribution_json(const GroupDistribution& q) {
    json out = json::object();
    for (int g = 0; g < GroupId::kCount; ++g) out[GroupId::from_index(g).name()] = q[g];
    return out;
}

json round_report_to_json(const RoundReport& report) {
    json metrics = summary_to_json(report.metrics);
    const BucketResult* full = report.metrics.full_range();
    json j{{"round", report.round},
           {"Q_init", distribution_json(report.q_init)},
           {"Q", distribution_json(report.q)},
           {"R", distribution_json(report.rates)},
           {"weights", report.weights},
           {"degenerate", report.degenerate}};
    j["metrics"] = json{{"ap_bev", full && full->ap_bev ? json(*full->ap_bev) : json(nullptr)},
                        {"ap_3d", full && full->ap_3d ? json(*full->ap_3d) : json(nullptr)},
                        {"per_bucket", metrics["buckets"]}};
    const BucketResult* weak_full = report.weak_metrics.full_range();
    j["weak_metrics"] =
        json{{"ap_bev", weak_full && weak_full->ap_bev ? json(*weak_full->ap_bev) : json(nullptr)},
             {"ap_3d", weak_full && weak_full->ap_3d ? json(*weak_full->ap_3d) : json(nullptr)},
             {"per_bucket", summary_to_json(report.weak_metrics)["buckets"]}};
    return j;
}

void save_round_reports(const fs::path& path, const std::vector<RoundReport>& reports,
                        const json& meta) {
    std::string out = json{{"meta", meta}}.dump() + "\n";
    for (const RoundReport& r : reports) out += round_report_to_json(r).dump() + "\n";
    write_file_atomic(path, out);
}

void save_metrics(const fs::path& path, const EvalSummary& summary, const json& meta) {
    json j = summary_to_json(summary);
    j["meta"] = meta;
    write_file_atomic(path, j.dump(2) + "\n");
}

void save_weights(const fs::path& path, const ModelWeights& weights, const json& meta) {
    write_file_atomic(path, json{{"weights", weights}, {"meta", meta}}.dump(2) + "\n");
}

ModelWeights load_weights(const fs::path& path) {
    return parse_json(path).at("weights").get<ModelWeights>();
}

SceneSpec load_scene_spec(const fs::path& path) {
    const json j = parse_json(path);
    SceneSpec spec;
    spec.world_extent = j.value("world_extent", spec.world_extent);
    spec.locations = j.value("locations", spec.locations);
    spec.heldout_locations = j.value("heldout_locations", spec.heldout_locations);
    spec.traversals = j.value("traversals", spec.traversals);
    spec.placement_azimuth_deg = j.value("placement_azimuth_deg", spec.placement_azimuth_deg);
    spec.mask_noise = j.value("mask_noise", spec.mask_noise);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("objects")) {
        for (int g = 0; g < GroupId::kCount; ++g) {
            const std::string name = GroupId::from_index(g).name();
            if (!j["objects"].contains(name)) continue;
            const json& o = j["objects"][name];
            ObjectSpec& os = spec.objects[size_t(g)];
            os.count = o.value("count", os.count);
            os.min_dist = o.value("min_dist", os.min_dist);
            os.max_dist = o.value("max_dist", os.max_dist);
            auto range = [&](const char* key, std::array<double, 2>& dst) {
                if (o.contains(key)) {
                    dst[0] = o[key].at(0).get<double>();
                    dst[1] = o[key].at(1).get<double>();
                }
            };
            range("length", os.length_range);
            range("width", os.width_range);
            range("height", os.height_range);
        }
    }
    if (j.contains("walls")) {
        spec.walls.clear();
        for (const json& w : j["walls"]) {
            OrientedBox box;
            box.center = {w.at("cx").get<double>(), w.at("cy").get<double>(),
                          w.at("cz").get<double>()};
            box.length = w.at("l").get<double>();
            box.width = w.at("w").get<double>();
            box.height = w.at("h").get<double>();
            box.yaw = w.value("yaw", 0.0);
            spec.walls.push_back(box);
        }
    }
    if (j.contains("sensor")) {
        const json& s = j["sensor"];
        spec.sensor.azimuth_steps = s.value("azimuth_steps", spec.sensor.azimuth_steps);
        spec.sensor.rings = s.value("rings", spec.sensor.rings);
        spec.sensor.fov_up_deg = s.value("fov_up_deg", spec.sensor.fov_up_deg);
        spec.sensor.fov_down_deg = s.value("fov_down_deg", spec.sensor.fov_down_deg);
        spec.sensor.max_range = s.value("max_range", spec.sensor.max_range);
        spec.sensor.dropout = s.value("dropout", spec.sensor.dropout);
        spec.sensor.mount_height = s.value("mount_height", spec.sensor.mount_height);
    }
    if (j.contains("camera")) {
        const json& cj = j["camera"];
        spec.camera.focal = cj.value("focal", spec.camera.focal);
        spec.camera.width = cj.value("width", spec.camera.width);
        spec.camera.height = cj.value("height", spec.camera.height);
        spec.camera.mount_height = cj.value("mount_height", spec.camera.mount_height);
    }
    spec.validate();
    return spec;
}

json scene_spec_to_json(const SceneSpec& spec) {
    json objects = json::object();
    for (int g = 0; g < GroupId::kCount; ++g) {
        const ObjectSpec& os = spec.objects[size_t(g)];
        objects[GroupId::from_index(g).name()] = {
            {"count", os.count},           {"min_dist", os.min_dist},
            {"max_dist", os.max_dist},     {"length", os.length_range},
            {"width", os.width_range},     {"height", os.height_range}};
    }
    json walls = json::array();
    for (const OrientedBox& w : spec.walls)
        walls.push_back({{"cx", w.center.x},
                         {"cy", w.center.y},
                         {"cz", w.center.z},
                         {"l", w.length},
                         {"w", w.width},
                         {"h", w.height},
                         {"yaw", w.yaw}});
    return json{{"world_extent", spec.world_extent},
                {"locations", spec.locations},
                {"heldout_locations", spec.heldout_locations},
                {"traversals", spec.traversals},
                {"placement_azimuth_deg", spec.placement_azimuth_deg},
                {"mask_noise", spec.mask_noise},
                {"seed", spec.seed},
                {"objects", objects},
                {"walls", walls},
                {"sensor",
                 {{"azimuth_steps", spec.sensor.azimuth_steps},
                  {"rings", spec.sensor.rings},
                  {"fov_up_deg", spec.sensor.fov_up_deg},
                  {"fov_down_deg", spec.sensor.fov_down_deg},
                  {"max_range", spec.sensor.max_range},
                  {"dropout", spec.sensor.dropout},
                  {"mount_height", spec.sensor.mount_height}}},
                {"camera",
                 {{"focal", spec.camera.focal},
                  {"width", spec.camera.width},
                  {"height", spec.camera.height},
                  {"mount_height", spec.camera.mount_height}}}};
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot write " + tmp.string());
        out.write(contents.data(), std::streamsize(contents.size()));
        if (!out) throw ParseError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace io
}  // namespace autolabel
