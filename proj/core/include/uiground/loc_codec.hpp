#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/geometry.hpp"

namespace uiground::loc {

/// Number of quantization bins per normalized axis.
inline constexpr int kBins = 1000;

/// One quantized coordinate bin, 0 <= index < kBins.
class LocToken {
public:
    /// Throws std::out_of_range for an index outside [0, kBins).
    explicit LocToken(int index);

    int index() const noexcept { return index_; }
    friend bool operator==(LocToken, LocToken) = default;
    friend auto operator<=>(LocToken, LocToken) = default;

private:
    int index_;
};

/// Textual wrapping of a token index, `<loc_K>` by default.
struct TokenFormat {
    std::string prefix = "<loc_";
    std::string suffix = ">";
};

/// floor(v * kBins) clamped to kBins - 1. Throws std::out_of_range unless 0 <= v <= 1.
LocToken quantize(double v);

/// Bin midpoint: (index + 0.5) / kBins.
double dequantize(LocToken t) noexcept;

std::string encode_token(LocToken t, const TokenFormat& fmt = {});

/// Four tokens in x1, y1, x2, y2 order with no separators.
std::string encode_box(const Box& b, const TokenFormat& fmt = {});

/// Two tokens in x, y order.
std::string encode_point(const Point& p, const TokenFormat& fmt = {});

struct ParseWarning {
    std::size_t offset = 0;   ///< byte offset of the fragment in the input
    std::string fragment;
    std::string reason;
};

struct ParseResult {
    std::vector<LocToken> tokens;
    /// Input with well-formed tokens removed. Malformed fragments are kept.
    std::string residual;
    std::vector<ParseWarning> warnings;
};

ParseResult parse_locations(std::string_view text, const TokenFormat& fmt = {});

/// Interprets exactly four tokens as a box (dequantized, corners sorted).
Box tokens_to_box(std::span<const LocToken> tokens);

/// Interprets exactly two tokens as a point.
Point tokens_to_point(std::span<const LocToken> tokens);

}  // namespace uiground::loc
