#include "uiground/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <sstream>

#include "uiground/errors.hpp"

namespace uiground::image {

namespace {

cv::Mat decode(const std::string& encoded) {
    const cv::Mat buf(1, static_cast<int>(encoded.size()), CV_8UC1, const_cast<char*>(encoded.data()));
    cv::Mat img = cv::imdecode(buf, cv::IMREAD_COLOR);
    if (img.empty()) throw DataError("cannot decode image");
    return img;
}

std::string encode_png(const cv::Mat& img) {
    std::vector<unsigned char> out;
    if (!cv::imencode(".png", img, out)) throw DataError("cannot encode PNG");
    return {out.begin(), out.end()};
}

cv::Rect pixel_rect(const cv::Mat& img, const Box& b) {
    const int x1 = std::clamp(static_cast<int>(std::floor(b.x1 * img.cols)), 0, img.cols - 1);
    const int y1 = std::clamp(static_cast<int>(std::floor(b.y1 * img.rows)), 0, img.rows - 1);
    const int x2 = std::clamp(static_cast<int>(std::ceil(b.x2 * img.cols)), x1 + 1, img.cols);
    const int y2 = std::clamp(static_cast<int>(std::ceil(b.y2 * img.rows)), y1 + 1, img.rows);
    return {x1, y1, x2 - x1, y2 - y1};
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<Size> dimensions(const std::string& encoded) {
    try {
        const auto img = decode(encoded);
        return Size{img.cols, img.rows};
    } catch (const DataError&) {
        return std::nullopt;
    }
}

std::string crop_png(const std::string& encoded, const Box& element, double context) {
    const auto img = decode(encoded);
    return encode_png(img(pixel_rect(img, expand(element, context))).clone());
}

std::string mark_png(const std::string& encoded, const Box& element) {
    auto img = decode(encoded);
    const int thickness = std::max(2, std::min(img.cols, img.rows) / 200);
    cv::rectangle(img, pixel_rect(img, element), cv::Scalar(0, 0, 255), thickness);
    return encode_png(img);
}

std::string mime_type(const std::string& encoded) {
    if (encoded.rfind("\x89PNG", 0) == 0) return "image/png";
    if (encoded.rfind("\xff\xd8", 0) == 0) return "image/jpeg";
    if (encoded.rfind("GIF8", 0) == 0) return "image/gif";
    if (encoded.size() > 12 && encoded.compare(8, 4, "WEBP") == 0) return "image/webp";
    return "application/octet-stream";
}

}  // namespace uiground::image
