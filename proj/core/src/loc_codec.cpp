#include "uiground/loc_codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uiground::loc {

LocToken::LocToken(int index) : index_(index) {
    if (index < 0 || index >= kBins) throw std::out_of_range("location bin " + std::to_string(index) + " out of range");
}

LocToken quantize(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::out_of_range("coordinate " + std::to_string(v) + " outside [0,1]");
    const auto bin = static_cast<int>(std::floor(v * kBins));
    return LocToken(std::min(bin, kBins - 1));
}

double dequantize(LocToken t) noexcept { return (t.index() + 0.5) / kBins; }

std::string encode_token(LocToken t, const TokenFormat& fmt) {
    std::string out;
    out.reserve(fmt.prefix.size() + fmt.suffix.size() + 3);
    out += fmt.prefix;
    out += std::to_string(t.index());
    out += fmt.suffix;
    return out;
}

std::string encode_box(const Box& b, const TokenFormat& fmt) {
    return encode_token(quantize(b.x1), fmt) + encode_token(quantize(b.y1), fmt) + encode_token(quantize(b.x2), fmt) +
           encode_token(quantize(b.y2), fmt);
}

std::string encode_point(const Point& p, const TokenFormat& fmt) {
    return encode_token(quantize(p.x), fmt) + encode_token(quantize(p.y), fmt);
}

ParseResult parse_locations(std::string_view text, const TokenFormat& fmt) {
    ParseResult out;
    out.residual.reserve(text.size());
    if (fmt.prefix.empty()) {
        out.residual.assign(text);
        return out;
    }

    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = text.find(fmt.prefix, pos);
        if (start == std::string_view::npos) {
            out.residual.append(text.substr(pos));
            break;
        }
        out.residual.append(text.substr(pos, start - pos));

        std::size_t cur = start + fmt.prefix.size();
        const std::size_t digits_begin = cur;
        while (cur < text.size() && text[cur] >= '0' && text[cur] <= '9') ++cur;
        const std::size_t ndigits = cur - digits_begin;
        const bool closed = text.substr(cur, fmt.suffix.size()) == fmt.suffix;

        if (ndigits > 0 && closed) {
            const std::size_t end = cur + fmt.suffix.size();
            // Values above 9 digits are out of range regardless of their magnitude.
            long value = kBins;
            if (ndigits <= 9) value = std::stol(std::string(text.substr(digits_begin, ndigits)));
            if (value < kBins) {
                out.tokens.emplace_back(static_cast<int>(value));
            } else {
                out.warnings.push_back({start, std::string(text.substr(start, end - start)), "bin out of range"});
                out.residual.append(text.substr(start, end - start));
            }
            pos = end;
            continue;
        }

        // Malformed: report everything up to the closing suffix, or up to the next
        // prefix / end of text when no suffix closes it.
        std::size_t end = text.size();
        const std::size_t next_prefix = text.find(fmt.prefix, start + 1);
        const std::size_t close = fmt.suffix.empty() ? std::string_view::npos : text.find(fmt.suffix, digits_begin);
        if (close != std::string_view::npos && (next_prefix == std::string_view::npos || close < next_prefix))
            end = close + fmt.suffix.size();
        else if (next_prefix != std::string_view::npos)
            end = next_prefix;
        out.warnings.push_back({start, std::string(text.substr(start, end - start)),
                                ndigits == 0 ? "non-numeric bin" : "unterminated token"});
        out.residual.append(text.substr(start, end - start));
        pos = end;
    }
    return out;
}

Box tokens_to_box(std::span<const LocToken> tokens) {
    if (tokens.size() != 4) throw std::invalid_argument("a box needs exactly 4 location tokens");
    const double a = dequantize(tokens[0]), b = dequantize(tokens[1]);
    const double c = dequantize(tokens[2]), d = dequantize(tokens[3]);
    return Box{std::min(a, c), std::min(b, d), std::max(a, c), std::max(b, d)};
}

Point tokens_to_point(std::span<const LocToken> tokens) {
    if (tokens.size() != 2) throw std::invalid_argument("a point needs exactly 2 location tokens");
    return Point{dequantize(tokens[0]), dequantize(tokens[1])};
}

}  // namespace uiground::loc
