// Synthetic grounding-dataset generator for simulation runs: deterministic
// gt boxes on a virtual screenshot, rotating categories.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uiground/util/rng.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic grounding dataset generator"};

    int n = 500;
    std::uint64_t seed = 0;
    double image_w = 1920, image_h = 1080;
    double min_edge = 80, max_edge = 160, margin = 200;
    std::string out_path, categories_arg = "Dev,Creative,CAD,Office";
    app.add_option("-n,--count", n, "number of samples");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--image-w", image_w, "virtual image width");
    app.add_option("--image-h", image_h, "virtual image height");
    app.add_option("--min-edge", min_edge, "minimum gt box edge");
    app.add_option("--max-edge", max_edge, "maximum gt box edge");
    app.add_option("--margin", margin, "border margin for gt centers");
    app.add_option("--categories", categories_arg, "comma-separated category cycle");
    app.add_option("--out", out_path, "output JSONL (default stdout)");

    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> categories;
    std::stringstream ss(categories_arg);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) categories.push_back(item);
    if (categories.empty()) categories.push_back("Default");

    if (n < 1 || image_w <= 2 * margin || image_h <= 2 * margin || min_edge > max_edge) {
        std::cerr << "error: inconsistent generator parameters\n";
        return 1;
    }

    uiground::Rng rng(seed);
    std::ostringstream out;
    for (int i = 0; i < n; ++i) {
        double w = rng.uniform_range(min_edge, max_edge);
        double h = rng.uniform_range(min_edge * 0.75, max_edge * 0.75);
        double cx = rng.uniform_range(margin, image_w - margin);
        double cy = rng.uniform_range(margin, image_h - margin);
        char id[16];
        std::snprintf(id, sizeof(id), "s%05d", i);
        nlohmann::json row{
            {"id", id},
            {"image", std::string("sim://") + id},
            {"image_w", image_w},
            {"image_h", image_h},
            {"instruction", std::string("click the target of ") + id},
            {"bbox", {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}},
            {"category", categories[static_cast<std::size_t>(i) % categories.size()]},
        };
        out << row.dump() << '\n';
    }

    if (out_path.empty() || out_path == "-") {
        std::cout << out.str();
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot write " << out_path << '\n';
            return 2;
        }
        file << out.str();
    }
    return 0;
}
