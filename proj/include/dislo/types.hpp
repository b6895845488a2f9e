#pragma once

// Shared market-data value types: fixed-point prices, session timestamps,
// quotes, trades and feed events.

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace dislo {

/// Price in units of 1e-4 USD. 1 cent = 100 units. Zero means "no quote".
struct Price {
    std::int64_t value = 0;

    static constexpr std::int64_t kUnitsPerDollar = 10'000;
    static constexpr std::int64_t kUnitsPerCent = 100;

    constexpr bool present() const noexcept { return value > 0; }

    friend constexpr auto operator<=>(Price, Price) = default;
    friend constexpr Price operator+(Price a, Price b) noexcept { return {a.value + b.value}; }
    friend constexpr Price operator-(Price a, Price b) noexcept { return {a.value - b.value}; }
};

constexpr Price dollars(std::int64_t d, std::int64_t cents = 0) {
    return {d * Price::kUnitsPerDollar + cents * Price::kUnitsPerCent};
}

/// Nanoseconds since session midnight at the single observer.
struct Timestamp {
    std::uint64_t ns = 0;
    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

inline constexpr std::uint64_t kNanosPerSecond = 1'000'000'000ULL;
inline constexpr std::uint64_t kNanosPerDay = 86'400ULL * kNanosPerSecond;
inline constexpr std::uint64_t kRegularOpenNs = (9ULL * 3600 + 30 * 60) * kNanosPerSecond;
inline constexpr std::uint64_t kRegularSessionNs = (6ULL * 3600 + 30 * 60) * kNanosPerSecond;

constexpr std::uint64_t micros(std::uint64_t us) { return us * 1'000ULL; }

// Inline fixed-capacity ASCII identifier. Cheap to copy and hash; ordering is
// lexicographic on the characters.
template <std::size_t Capacity>
class FixedName {
public:
    constexpr FixedName() = default;
    constexpr FixedName(std::string_view s) { assign(s); }
    constexpr FixedName(const char* s) : FixedName(std::string_view{s}) {}

    static constexpr std::size_t capacity() { return Capacity; }

    constexpr std::string_view view() const { return {chars_.data(), size_}; }
    std::string str() const { return std::string{view()}; }
    constexpr bool empty() const { return size_ == 0; }
    constexpr std::size_t size() const { return size_; }

    friend constexpr bool operator==(const FixedName& a, const FixedName& b) {
        return a.view() == b.view();
    }
    friend constexpr auto operator<=>(const FixedName& a, const FixedName& b) {
        return a.view() <=> b.view();
    }

private:
    constexpr void assign(std::string_view s) {
        if (s.size() > Capacity) throw std::length_error("identifier too long: " + std::string{s});
        std::copy(s.begin(), s.end(), chars_.begin());
        size_ = static_cast<std::uint8_t>(s.size());
    }

    std::array<char, Capacity> chars_{};
    std::uint8_t size_ = 0;
};

using Ticker = FixedName<15>;
using ExchangeId = FixedName<8>;

inline bool valid_ticker(std::string_view s) {
    if (s.empty() || s.size() > Ticker::capacity()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '.' || c == '-' || c == '_' || c == '/';
    });
}

inline bool valid_exchange(std::string_view s) {
    if (s.empty() || s.size() > ExchangeId::capacity()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

struct Quote {
    Price bid;
    std::uint32_t bid_size = 0;
    Price offer;
    std::uint32_t offer_size = 0;

    friend constexpr bool operator==(const Quote&, const Quote&) = default;
    constexpr bool same_prices(const Quote& o) const { return bid == o.bid && offer == o.offer; }
};

struct TradeMsg {
    Price price;
    std::uint32_t volume = 0;
    friend constexpr bool operator==(const TradeMsg&, const TradeMsg&) = default;
};

/// Either the SIP tape or one exchange's direct feed.
struct Source {
    bool sip = true;
    ExchangeId exchange;  // empty for SIP

    static Source make_sip() { return {true, {}}; }
    static Source direct(ExchangeId e) { return {false, e}; }
    bool is_direct() const { return !sip; }

    friend bool operator==(const Source&, const Source&) = default;
    // SIP sorts before any direct feed; direct feeds by exchange id.
    friend auto operator<=>(const Source& a, const Source& b) {
        if (a.sip != b.sip) return a.sip ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.exchange <=> b.exchange;
    }
};

struct FeedEvent {
    Timestamp ts;
    Ticker symbol;
    Source source;
    std::variant<Quote, TradeMsg> payload;

    bool is_quote() const { return std::holds_alternative<Quote>(payload); }
    bool is_trade() const { return std::holds_alternative<TradeMsg>(payload); }
    const Quote& quote() const { return std::get<Quote>(payload); }
    const TradeMsg& trade() const { return std::get<TradeMsg>(payload); }

    friend bool operator==(const FeedEvent&, const FeedEvent&) = default;
};

enum class Category { DOW, SPEXDOW, REXSP, ETF, OTHER };

inline std::string_view to_string(Category c) {
    switch (c) {
        case Category::DOW: return "DOW";
        case Category::SPEXDOW: return "SPEXDOW";
        case Category::REXSP: return "REXSP";
        case Category::ETF: return "ETF";
        case Category::OTHER: return "OTHER";
    }
    return "OTHER";
}

inline std::optional<Category> parse_category(std::string_view s) {
    if (s == "DOW") return Category::DOW;
    if (s == "SPEXDOW") return Category::SPEXDOW;
    if (s == "REXSP") return Category::REXSP;
    if (s == "ETF") return Category::ETF;
    if (s == "OTHER") return Category::OTHER;
    return std::nullopt;
}

struct SymbolMeta {
    Ticker ticker;
    std::optional<double> market_cap;  // USD
    std::string sector;
    Category category = Category::OTHER;
};

/// First violated invariant of an event, or nullopt when well formed.
inline std::optional<std::string> validate_event(const FeedEvent& e) {
    if (e.symbol.empty()) return "symbol must be non-empty";
    if (!e.source.sip && !valid_exchange(e.source.exchange.view()))
        return "direct source needs an exchange id of 1-8 uppercase letters";
    if (e.is_trade()) {
        const auto& t = e.trade();
        if (!e.source.sip) return "trades must be carried on the SIP source";
        if (t.volume == 0) return "volume must be positive";
        if (t.price.value <= 0) return "trade price must be positive";
        return std::nullopt;
    }
    const auto& q = e.quote();
    if (q.bid.value < 0 || q.offer.value < 0) return "quote prices must be non-negative";
    if ((q.bid.value == 0) != (q.bid_size == 0)) return "absent bid must be encoded as 0,0";
    if ((q.offer.value == 0) != (q.offer_size == 0)) return "absent offer must be encoded as 0,0";
    // Locked and crossed markets are legal.
    return std::nullopt;
}

// ---- decimal USD conversion -------------------------------------------------

/// Formats a price as decimal dollars with exactly four fractional digits.
inline std::string format_price(Price p) {
    const bool neg = p.value < 0;
    const std::uint64_t mag = neg ? 0ULL - static_cast<std::uint64_t>(p.value)
                                  : static_cast<std::uint64_t>(p.value);
    std::string whole = std::to_string(mag / 10'000);
    std::string frac = std::to_string(mag % 10'000);
    frac.insert(0, 4 - frac.size(), '0');
    return (neg ? "-" : "") + whole + "." + frac;
}

/// Parses "D[.dddd]" decimal dollars; more than four fractional digits is rejected.
inline std::optional<Price> parse_price(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    if (s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() || frac.size() > 4) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    std::int64_t w = 0;
    auto [pw, ew] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (ew != std::errc{} || pw != whole.data() + whole.size() || w < 0) return std::nullopt;
    std::int64_t f = 0;
    if (!frac.empty()) {
        auto [pf, ef] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
        if (ef != std::errc{} || pf != frac.data() + frac.size()) return std::nullopt;
        for (std::size_t i = frac.size(); i < 4; ++i) f *= 10;
    }
    const std::int64_t v = w * 10'000 + f;
    return Price{neg ? -v : v};
}

/// Renders a non-negative count with thousands separators.
inline std::string with_commas(std::string digits) {
    const bool neg = !digits.empty() && digits.front() == '-';
    std::string_view body{digits};
    if (neg) body.remove_prefix(1);
    const auto dot = body.find('.');
    std::string_view whole = body.substr(0, dot);
    std::string out;
    for (std::size_t i = 0; i < whole.size(); ++i) {
        if (i > 0 && (whole.size() - i) % 3 == 0) out.push_back(',');
        out.push_back(whole[i]);
    }
    if (dot != std::string_view::npos) out.append(body.substr(dot));
    return (neg ? "-" : "") + out;
}

/// 1e-4 USD amount rounded half away from zero to cents, e.g. "2,051,916,739.66".
inline std::string format_usd_cents(std::int64_t units, bool commas = true) {
    const bool neg = units < 0;
    std::uint64_t mag = neg ? 0ULL - static_cast<std::uint64_t>(units) : static_cast<std::uint64_t>(units);
    const std::uint64_t cents = (mag + 50) / 100;
    std::string whole = std::to_string(cents / 100);
    std::string frac = std::to_string(cents % 100);
    frac.insert(0, 2 - frac.size(), '0');
    std::string s = whole + "." + frac;
    if (commas) s = with_commas(s);
    return (neg && cents != 0 ? "-" : "") + s;
}

}  // namespace dislo

template <std::size_t N>
struct std::hash<dislo::FixedName<N>> {
    std::size_t operator()(const dislo::FixedName<N>& n) const noexcept {
        // FNV-1a
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : n.view()) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};
