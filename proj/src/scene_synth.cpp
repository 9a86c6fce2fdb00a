#include "autolabel/scene_synth.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <set>

namespace autolabel {

namespace {

constexpr int kSourceGround = -1;

struct Ray {
    Eigen::Vector3d origin;
    Eigen::Vector3d dir;  // unit
};

// Nearest intersection of a ray with a yaw-oriented box; negative when missed.
double ray_box_hit(const Ray& ray, const OrientedBox& box) {
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    // into box frame
    const double ox = ray.origin.x() - box.center.x, oy = ray.origin.y() - box.center.y;
    const double oz = ray.origin.z() - box.center.z;
    const Eigen::Vector3d o(c * ox + s * oy, -s * ox + c * oy, oz);
    const Eigen::Vector3d d(c * ray.dir.x() + s * ray.dir.y(),
                            -s * ray.dir.x() + c * ray.dir.y(), ray.dir.z());
    const double half[3] = {0.5 * box.length, 0.5 * box.width, 0.5 * box.height};
    double t_near = 0.0, t_far = std::numeric_limits<double>::max();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-12) {
            if (std::abs(o[a]) > half[a]) return -1.0;
            continue;
        }
        double t0 = (-half[a] - o[a]) / d[a];
        double t1 = (half[a] - o[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
        if (t_near > t_far) return -1.0;
    }
    return t_near > 1e-9 ? t_near : -1.0;
}

struct PlacedWorld {
    std::vector<OrientedBox> walls;
    std::vector<OrientedBox> objects;
    std::vector<int> object_group;  // group index per object
};

bool overlaps_bev(const OrientedBox& a, const OrientedBox& b, double margin) {
    const double dx = a.center.x - b.center.x, dy = a.center.y - b.center.y;
    const double ra = 0.5 * std::hypot(a.length, a.width);
    const double rb = 0.5 * std::hypot(b.length, b.width);
    return std::hypot(dx, dy) < ra + rb + margin;
}

PlacedWorld place_objects(const SceneSpec& spec, uint64_t location_key, int traversal) {
    PlacedWorld world;
    world.walls = spec.walls;
    const double az_limit = spec.placement_azimuth_deg * M_PI / 180.0;
    for (int g = 0; g < 4; ++g) {
        const ObjectSpec& os = spec.objects[size_t(g)];
        for (int j = 0; j < os.count; ++j) {
            rng::CounterRng gen({spec.seed, location_key, uint64_t(traversal), uint64_t(g),
                                 uint64_t(j), 0xb0bULL});
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                const double dist = gen.uniform_in(os.min_dist, os.max_dist);
                const double az = gen.uniform_in(-az_limit, az_limit);
                OrientedBox box;
                box.length = gen.uniform_in(os.length_range[0], os.length_range[1]);
                box.width = gen.uniform_in(os.width_range[0], os.width_range[1]);
                box.height = gen.uniform_in(os.height_range[0], os.height_range[1]);
                // oblique yaw so two faces stay visible from the ego
                box.yaw = normalize_yaw(az + M_PI / 4.0 + gen.uniform_in(-0.15, 0.15));
                box.center = {dist * std::cos(az), dist * std::sin(az), 0.5 * box.height};
                bool clear = true;
                for (const OrientedBox& w : world.walls)
                    if (overlaps_bev(box, w, 0.8)) clear = false;
                for (const OrientedBox& other : world.objects)
                    if (overlaps_bev(box, other, 1.2)) clear = false;
                if (clear) {
                    world.objects.push_back(box);
                    world.object_group.push_back(g);
                    placed = true;
                }
            }
            if (!placed)
                throw ConfigError("could not place object of group " + std::to_string(g) +
                                  "; scene too dense");
        }
    }
    return world;
}

CameraModel make_camera(const SceneSpec& spec) {
    CameraModel cam;
    cam.width = spec.camera.width;
    cam.height = spec.camera.height;
    cam.intrinsic << spec.camera.focal, 0.0, spec.camera.width / 2.0, 0.0, spec.camera.focal,
        spec.camera.height / 2.0, 0.0, 0.0, 1.0;
    // camera looks along world +x: x_cam = -y_w, y_cam = -z_w, z_cam = +x_w
    Eigen::Matrix3d r;
    r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
    const Eigen::Vector3d position(0.0, 0.0, spec.camera.mount_height);
    cam.extrinsic.rotation = r;
    cam.extrinsic.translation = -(r * position);
    return cam;
}

}  // namespace

void SceneSpec::validate() const {
    if (traversals < 2) throw ConfigError("scene needs >= 2 traversals");
    if (locations < 1) throw ConfigError("scene needs >= 1 location");
    if (heldout_locations < 0) throw ConfigError("heldout_locations must be >= 0");
    if (!(world_extent > 0.0)) throw ConfigError("world_extent must be positive");
    if (sensor.rings < 1 || sensor.azimuth_steps < 4) throw ConfigError("sensor grid too small");
    if (!(sensor.dropout >= 0.0) || sensor.dropout >= 1.0)
        throw ConfigError("dropout must be in [0, 1)");
    if (!(sensor.fov_down_deg < sensor.fov_up_deg)) throw ConfigError("sensor fov is inverted");
    for (int g = 0; g < 4; ++g) {
        const ObjectSpec& os = objects[size_t(g)];
        if (os.count < 0) throw ConfigError("object count must be >= 0");
        if (os.count > 0 && !(os.min_dist < os.max_dist))
            throw ConfigError("object distance range is inverted");
    }
}

GeneratedScene generate(const SceneSpec& spec) {
    spec.validate();
    GeneratedScene scene;

    const int total_locations = spec.locations + spec.heldout_locations;
    scene.frames.resize(size_t(total_locations) * spec.traversals);
    scene.traversal_groups.resize(size_t(total_locations));

    const CameraModel camera_template = make_camera(spec);

#pragma omp parallel for schedule(dynamic)
    for (int loc = 0; loc < total_locations; ++loc) {
        const std::string location_id = "loc" + std::to_string(loc);
        const uint64_t location_key = rng::hash_string(location_id);
        const bool heldout = loc >= spec.locations;

        for (int tv = 0; tv < spec.traversals; ++tv) {
            GeneratedFrame frame;
            frame.id = location_id + "_t" + std::to_string(tv);
            frame.location = location_id;
            frame.traversal = tv;
            frame.heldout = heldout;

            // per-traversal pose: yaw and height jitter, ego xy pinned at the origin
            rng::CounterRng pose_gen({spec.seed, location_key, uint64_t(tv), 0x905eULL});
            const double yaw_jitter = pose_gen.uniform_in(-0.09, 0.09);
            const double z_jitter = pose_gen.uniform_in(-0.03, 0.03);
            frame.pose = Pose::yaw_about_z(yaw_jitter, {0.0, 0.0, z_jitter});

            const PlacedWorld world = place_objects(spec, location_key, tv);

            // ray casting in world coordinates from the sensor head
            const Eigen::Vector3d origin(0.0, 0.0, spec.sensor.mount_height + z_jitter);
            const double fov_lo = spec.sensor.fov_down_deg * M_PI / 180.0;
            const double fov_hi = spec.sensor.fov_up_deg * M_PI / 180.0;
            PointCloud world_cloud;
            for (int ring = 0; ring < spec.sensor.rings; ++ring) {
                const double elev =
                    spec.sensor.rings == 1
                        ? fov_lo
                        : fov_lo + (fov_hi - fov_lo) * double(ring) / (spec.sensor.rings - 1);
                for (int step = 0; step < spec.sensor.azimuth_steps; ++step) {
                    const double az =
                        2.0 * M_PI * double(step) / spec.sensor.azimuth_steps + yaw_jitter;
                    Ray ray{origin,
                            {std::cos(az) * std::cos(elev), std::sin(az) * std::cos(elev),
                             std::sin(elev)}};
                    double best_t = std::numeric_limits<double>::max();
                    int source = INT_MIN;
                    if (ray.dir.z() < 0.0) {
                        const double t = -origin.z() / ray.dir.z();
                        const double gx = origin.x() + t * ray.dir.x();
                        const double gy = origin.y() + t * ray.dir.y();
                        if (std::abs(gx) <= spec.world_extent && std::abs(gy) <= spec.world_extent) {
                            best_t = t;
                            source = kSourceGround;
                        }
                    }
                    for (size_t w = 0; w < world.walls.size(); ++w) {
                        const double t = ray_box_hit(ray, world.walls[w]);
                        if (t > 0.0 && t < best_t) {
                            best_t = t;
                            source = -2 - int(w);
                        }
                    }
                    for (size_t ob = 0; ob < world.objects.size(); ++ob) {
                        const double t = ray_box_hit(ray, world.objects[ob]);
                        if (t > 0.0 && t < best_t) {
                            best_t = t;
                            source = int(ob);
                        }
                    }
                    if (source == INT_MIN || best_t > spec.sensor.max_range) continue;
                    const uint64_t ray_id = uint64_t(ring) * spec.sensor.azimuth_steps + step;
                    rng::CounterRng drop_gen(
                        {spec.seed, location_key, uint64_t(tv), ray_id, 0xd309ULL});
                    if (drop_gen.next_uniform() < spec.sensor.dropout) continue;
                    world_cloud.points.push_back(Point3::from(origin + best_t * ray.dir));
                    frame.point_source.push_back(source);
                }
            }

            frame.camera = camera_template;
            frame.cloud_sensor = transform_to_world_serial(world_cloud, frame.pose.inverse());

            for (size_t ob = 0; ob < world.objects.size(); ++ob) {
                Label gt;
                gt.box = world.objects[ob].canonical();
                gt.source = LabelSource::truth;
                gt.confidence = 1.0;
                gt.frame = frame.id;
                frame.ground_truth.push_back(std::move(gt));
            }

            // masks: exact pixel sets of each object's returns, dilated by 1px
            const ProjectionSet proj = project_points_serial(world_cloud, frame.camera, 0.1);
            std::vector<std::vector<int64_t>> object_pixels(world.objects.size());
            for (size_t i = 0; i < world_cloud.points.size(); ++i) {
                const int src = frame.point_source[i];
                if (src < 0 || !proj.items[i].valid) continue;
                const long u = std::lround(proj.items[i].u);
                const long v = std::lround(proj.items[i].v);
                object_pixels[src].push_back(int64_t(v) * frame.camera.width + u);
            }
            rng::CounterRng mask_gen({spec.seed, location_key, uint64_t(tv), 0x3a5cULL});
            for (size_t ob = 0; ob < object_pixels.size(); ++ob) {
                if (object_pixels[ob].empty()) continue;
                std::set<int64_t> px;
                const int w = frame.camera.width, h = frame.camera.height;
                for (int64_t p : object_pixels[ob]) {
                    const int pu = int(p % w), pv = int(p / w);
                    for (int du = -1; du <= 1; ++du)
                        for (int dv = -1; dv <= 1; ++dv) {
                            const int nu = pu + du, nv = pv + dv;
                            if (nu >= 0 && nu < w && nv >= 0 && nv < h)
                                px.insert(int64_t(nv) * w + nu);
                        }
                }
                if (spec.mask_noise > 0.0) {
                    // boundary jitter: randomly drop a fraction of mask pixels
                    std::set<int64_t> noisy;
                    for (int64_t p : px)
                        if (mask_gen.next_uniform() >= spec.mask_noise) noisy.insert(p);
                    if (!noisy.empty()) px = std::move(noisy);
                }
                std::vector<int64_t> flat(px.begin(), px.end());
                frame.masks.push_back(Mask2D::from_pixels(w, h, flat, "object", 1.0));
            }

            const size_t frame_slot = size_t(loc) * spec.traversals + tv;
            scene.frames[frame_slot] = std::move(frame);
            scene.traversal_groups[loc].push_back(int(frame_slot));
        }
    }
    return scene;
}

}  // namespace autolabel
