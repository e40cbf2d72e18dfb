#include "uiground/contamination.hpp"

#include <cctype>
#include <filesystem>

#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"

namespace uiground::contamination {

namespace fs = std::filesystem;

std::string normalize_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

void BenchmarkIndex::add_image_hash(std::string hash) { images_.insert(std::move(hash)); }

void BenchmarkIndex::add_annotation(std::string_view text, const Box& box) {
    annotations_[normalize_text(text)].push_back(box);
}

void BenchmarkIndex::add(const BenchmarkCase& c, const std::optional<std::string>& image_hash) {
    add_annotation(c.command, c.gt_box);
    if (image_hash) add_image_hash(*image_hash);
}

bool BenchmarkIndex::matches_annotation(std::string_view text, const Box& box) const {
    auto it = annotations_.find(normalize_text(text));
    if (it == annotations_.end()) return false;
    for (const auto& b : it->second)
        if (iou(b, box) >= iou_threshold_) return true;
    return false;
}

std::size_t BenchmarkIndex::annotation_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [text, boxes] : annotations_) n += boxes.size();
    return n;
}

std::optional<std::string> FileImageHasher::operator()(const Sample& s) {
    if (auto it = s.meta.find("image_sha256"); it != s.meta.end()) return it->second;
    fs::path p(s.image_ref);
    if (!p.is_absolute() && !root_.empty()) p = fs::path(root_) / p;
    const auto key = p.string();
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    std::optional<std::string> hash;
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) hash = sha256_file_hex(key);
    std::lock_guard lock(mu_);
    cache_.emplace(key, hash);
    return hash;
}

namespace {

bool annotation_hit(const Sample& s, const BenchmarkIndex& index) {
    if (s.target_boxes.empty()) return false;
    auto check = [&](std::string_view text) {
        if (text.empty()) return false;
        for (const auto& b : s.target_boxes)
            if (index.matches_annotation(text, b)) return true;
        return false;
    };
    if (check(s.prompt)) return true;
    if (s.target_text && check(*s.target_text)) return true;
    for (const char* key : {"command", "caption", "purpose", "expectation"}) {
        auto it = s.meta.find(key);
        if (it != s.meta.end() && check(it->second)) return true;
    }
    return false;
}

}  // namespace

std::vector<Sample> filter(std::vector<Sample> samples, const BenchmarkIndex& index, const ImageHasher& hasher,
                           FilterReport* report) {
    FilterReport r;
    std::vector<Sample> kept;
    kept.reserve(samples.size());
    for (auto& s : samples) {
        if (index.image_count() > 0 && hasher) {
            if (auto h = hasher(s); h && index.has_image(*h)) {
                ++r.dropped_image;
                continue;
            }
        }
        if (annotation_hit(s, index)) {
            ++r.dropped_annotation;
            continue;
        }
        ++r.kept;
        kept.push_back(std::move(s));
    }
    if (report) *report = r;
    return kept;
}

BenchmarkIndex load_index(const std::vector<std::string>& benchmark_paths, double iou_threshold) {
    BenchmarkIndex index(iou_threshold);
    for (const auto& path : benchmark_paths) {
        const auto root = fs::path(path).parent_path();
        for (const auto& c : read_benchmark(path)) {
            std::optional<std::string> hash = c.image_sha256;
            if (!hash && !c.image_ref.empty()) {
                fs::path img(c.image_ref);
                if (!img.is_absolute()) img = root / img;
                std::error_code ec;
                if (fs::is_regular_file(img, ec)) hash = sha256_file_hex(img.string());
            }
            index.add(c, hash);
        }
    }
    return index;
}

}  // namespace uiground::contamination
