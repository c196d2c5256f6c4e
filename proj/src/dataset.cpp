#include <algorithm>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "vsod/imaging.hpp"
#include "vsod/pipeline.hpp"
#include "vsod/png_io.hpp"

namespace fs = std::filesystem;

namespace vsod {

std::vector<ImagePair> ingest_image_dataset(const std::string& root, IngestStats* stats,
                                            std::ostream* log) {
    fs::path images = fs::path(root) / "images";
    fs::path masks = fs::path(root) / "masks";
    if (!fs::is_directory(images))
        throw std::runtime_error("image dataset has no images/ directory: " + root);

    std::map<std::string, fs::path> stems;
    for (const auto& entry : fs::directory_iterator(images))
        if (entry.path().extension() == ".png")
            stems[entry.path().stem().string()] = entry.path();

    IngestStats local;
    std::vector<ImagePair> out;
    for (const auto& [stem, image_path] : stems) {
        fs::path mask_path = masks / (stem + ".png");
        if (!fs::exists(mask_path)) {
            ++local.skipped;
            if (log) *log << "warning: no mask for " << stem << ", pair skipped\n";
            continue;
        }
        ImagePair pair;
        pair.stem = stem;
        try {
            pair.image = read_rgb_png(image_path.string());
            GrayMap mask_gray = read_gray_png(mask_path.string());
            if (mask_gray.h != pair.image.h || mask_gray.w != pair.image.w) {
                ++local.skipped;
                if (log) *log << "warning: size mismatch for " << stem << ", pair skipped\n";
                continue;
            }
            bool binary = std::all_of(mask_gray.v.begin(), mask_gray.v.end(),
                                      [](double v) { return v == 0.0 || v == 1.0; });
            if (!binary) {
                ++local.coerced;
                if (log) *log << "warning: non-binary mask for " << stem << ", binarized at 0.5\n";
            }
            pair.mask = threshold(mask_gray, 0.5);
        } catch (const std::exception& e) {
            ++local.skipped;
            if (log) *log << "warning: unreadable pair " << stem << " (" << e.what() << ")\n";
            continue;
        }
        ++local.loaded;
        out.push_back(std::move(pair));
    }
    if (stats) *stats = local;
    if (out.empty())
        throw std::runtime_error("image dataset at " + root + " has no usable image/mask pairs");
    return out;
}

}  // namespace vsod
