#pragma once

#include <span>
#include <string>
#include <vector>

#include "autolabel/geometry.hpp"

namespace autolabel {

// Which branch produced a label. `truth` marks dataset ground truth files.
enum class LabelSource { lidar, image, model, truth };

std::string to_string(LabelSource source);
LabelSource label_source_from_string(const std::string& s);

struct Label {
    OrientedBox box;
    LabelSource source = LabelSource::lidar;
    double confidence = 1.0;
    std::string frame;

    void validate() const;
};

struct FusionParams {
    double d_min = 10.0;  // image-derived boxes closer than this are dropped

    void validate() const;
};

// BEV distance from the ego origin to the box center (z ignored).
double box_distance(const OrientedBox& box);

// Distance-aware union: lidar labels plus the image labels at distance
// >= d_min. Pure set semantics; no deduplication or re-scoring. All labels
// must share one frame id.
std::vector<Label> fuse_labels(const std::vector<Label>& lidar, const std::vector<Label>& image,
                               const FusionParams& params);

}  // namespace autolabel
