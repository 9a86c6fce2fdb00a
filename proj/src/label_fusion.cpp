#include "autolabel/label_fusion.hpp"

#include <cmath>

namespace autolabel {

std::string to_string(LabelSource source) {
    switch (source) {
        case LabelSource::lidar: return "lidar";
        case LabelSource::image: return "image";
        case LabelSource::model: return "model";
        case LabelSource::truth: return "truth";
    }
    throw ValidationError("unknown label source");
}

LabelSource label_source_from_string(const std::string& s) {
    if (s == "lidar") return LabelSource::lidar;
    if (s == "image") return LabelSource::image;
    if (s == "model") return LabelSource::model;
    if (s == "truth") return LabelSource::truth;
    throw ParseError("unknown label source '" + s + "'");
}

void Label::validate() const {
    box.validate();
    if (!std::isfinite(confidence)) throw ValidationError("label confidence is not finite");
}

void FusionParams::validate() const {
    if (!(d_min >= 0.0)) throw ConfigError("d_min must be >= 0");
}

double box_distance(const OrientedBox& box) {
    return std::hypot(box.center.x, box.center.y);
}

std::vector<Label> fuse_labels(const std::vector<Label>& lidar, const std::vector<Label>& image,
                               const FusionParams& params) {
    params.validate();
    const std::string* frame = nullptr;
    auto check_frame = [&](const Label& l) {
        l.validate();
        if (frame == nullptr)
            frame = &l.frame;
        else if (l.frame != *frame)
            throw ValidationError("fuse_labels: mixed frame ids '" + *frame + "' and '" + l.frame +
                                  "'");
    };
    for (const Label& l : lidar) check_frame(l);
    for (const Label& l : image) check_frame(l);

    std::vector<Label> fused = lidar;
    for (const Label& l : image)
        if (box_distance(l.box) >= params.d_min) fused.push_back(l);
    return fused;
}

}  // namespace autolabel
