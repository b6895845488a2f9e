#pragma once

// Line-oriented feed files, the k-way merged observer stream, and symbol
// metadata.
//
// Record grammar (one event per LF-terminated line):
//   Q,<ts_ns>,<symbol>,<source>,<bid_1e-4usd>,<bid_shares>,<offer_1e-4usd>,<offer_shares>
//   T,<ts_ns>,<symbol>,SIP,<price_1e-4usd>,<shares>
// <source> is SIP or D:<EXCH> with EXCH in [A-Z]{1,8}. An absent quote side
// is written 0,0. An optional first line `#dislo-feed,<version>,<date>,<symbols>`
// carries the file header.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dislo/csv.hpp"
#include "dislo/errors.hpp"
#include "dislo/types.hpp"

namespace dislo {

inline constexpr int kFeedFormatVersion = 1;
inline constexpr std::string_view kFeedHeaderTag = "#dislo-feed";

struct EventFileHeader {
    int version = kFeedFormatVersion;
    std::string session_date;  // YYYY-MM-DD
    std::uint32_t symbol_count = 0;

    friend bool operator==(const EventFileHeader&, const EventFileHeader&) = default;
};

namespace detail {

class FieldCursor {
public:
    explicit FieldCursor(std::string_view line) : line_(line) {}

    std::string_view next(const char* field) {
        if (pos_ > line_.size()) throw ParseError(field, line_.size(), "missing field");
        const auto end = line_.find(',', pos_);
        const auto stop = end == std::string_view::npos ? line_.size() : end;
        start_ = pos_;
        std::string_view f = line_.substr(pos_, stop - pos_);
        pos_ = stop + 1;
        return f;
    }

    template <typename Int>
    Int integer(const char* field) {
        std::string_view f = next(field);
        Int v{};
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc{} || p != f.data() + f.size())
            throw ParseError(field, start_, "not an integer");
        return v;
    }

    void expect_end() const {
        if (pos_ <= line_.size()) throw ParseError("record", pos_ - 1, "trailing fields");
    }

    std::size_t start() const { return start_; }

private:
    std::string_view line_;
    std::size_t pos_ = 0;
    std::size_t start_ = 0;
};

inline Price parse_price_units(FieldCursor& c, const char* field) {
    const auto v = c.integer<std::int64_t>(field);
    if (v < 0) throw ParseError(field, c.start(), "negative price");
    return Price{v};
}

}  // namespace detail

/// Decodes one record. Throws ParseError naming the field and byte offset.
inline FeedEvent parse_event(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    detail::FieldCursor c(line);
    FeedEvent e;
    const auto kind = c.next("kind");
    if (kind != "Q" && kind != "T") throw ParseError("kind", 0, "expected Q or T");
    e.ts.ns = c.integer<std::uint64_t>("ts");
    const auto sym = c.next("symbol");
    if (!valid_ticker(sym)) throw ParseError("symbol", c.start(), "invalid ticker");
    e.symbol = Ticker{sym};
    const auto src = c.next("source");
    if (src == "SIP") {
        e.source = Source::make_sip();
    } else if (src.size() > 2 && src.substr(0, 2) == "D:" && valid_exchange(src.substr(2))) {
        e.source = Source::direct(ExchangeId{src.substr(2)});
    } else {
        throw ParseError("source", c.start(), "unknown source tag");
    }
    if (kind == "Q") {
        Quote q;
        q.bid = detail::parse_price_units(c, "bid");
        q.bid_size = c.integer<std::uint32_t>("bid_size");
        q.offer = detail::parse_price_units(c, "offer");
        q.offer_size = c.integer<std::uint32_t>("offer_size");
        e.payload = q;
    } else {
        if (!e.source.sip) throw ParseError("source", c.start(), "trades must be on SIP");
        TradeMsg t;
        t.price = detail::parse_price_units(c, "price");
        t.volume = c.integer<std::uint32_t>("volume");
        e.payload = t;
    }
    c.expect_end();
    return e;
}

/// Appends the record for `e` (without newline) to `out`.
inline void append_event(std::string& out, const FeedEvent& e) {
    char buf[24];
    auto put_int = [&](auto v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, p);
    };
    out.push_back(e.is_quote() ? 'Q' : 'T');
    out.push_back(',');
    put_int(e.ts.ns);
    out.push_back(',');
    out.append(e.symbol.view());
    out.push_back(',');
    if (e.source.sip) {
        out.append("SIP");
    } else {
        out.append("D:");
        out.append(e.source.exchange.view());
    }
    out.push_back(',');
    if (e.is_quote()) {
        const auto& q = e.quote();
        put_int(q.bid.value);
        out.push_back(',');
        put_int(q.bid_size);
        out.push_back(',');
        put_int(q.offer.value);
        out.push_back(',');
        put_int(q.offer_size);
    } else {
        const auto& t = e.trade();
        put_int(t.price.value);
        out.push_back(',');
        put_int(t.volume);
    }
}

inline std::string write_event(const FeedEvent& e) {
    std::string s;
    append_event(s, e);
    return s;
}

inline std::string format_header(const EventFileHeader& h) {
    return std::string{kFeedHeaderTag} + "," + std::to_string(h.version) + "," + h.session_date + "," +
           std::to_string(h.symbol_count);
}

inline std::optional<EventFileHeader> parse_header(std::string_view line) {
    auto f = csv::split(line);
    if (f.size() != 4 || f[0] != kFeedHeaderTag) return std::nullopt;
    EventFileHeader h;
    auto v = csv::to_int<int>(f[1]);
    auto n = csv::to_int<std::uint32_t>(f[3]);
    if (!v || !n) return std::nullopt;
    h.version = *v;
    h.session_date = std::string{f[2]};
    h.symbol_count = *n;
    return h;
}

/// Pull-based source of time-ordered events.
class EventSource {
public:
    virtual ~EventSource() = default;
    virtual std::optional<FeedEvent> next() = 0;
    virtual std::string name() const = 0;
    virtual std::size_t position() const = 0;  // line (files) or index (memory)
};

/// Streams one feed file, validating grammar, invariants and ts order.
class EventFileReader final : public EventSource {
public:
    explicit EventFileReader(std::string path) : path_(std::move(path)) {
        in_.rdbuf()->pubsetbuf(buffer_.get(), kBufferSize);
        in_.open(path_, std::ios::binary);
        if (!in_) throw InputError("cannot open " + path_);
        // Peek the optional header.
        if (std::getline(in_, line_)) {
            ++lineno_;
            csv::strip_cr(line_);
            if (!line_.empty() && line_.front() == '#') {
                header_ = parse_header(line_);
                if (!header_) throw FormatError(path_, lineno_, "malformed header");
                if (header_->version != kFeedFormatVersion)
                    throw FormatError(path_, lineno_,
                                      "unsupported format version " + std::to_string(header_->version));
            } else {
                pending_ = true;
            }
        }
    }

    const std::optional<EventFileHeader>& header() const { return header_; }

    std::optional<FeedEvent> next() override {
        while (true) {
            if (!pending_) {
                if (!std::getline(in_, line_)) return std::nullopt;
                ++lineno_;
            }
            pending_ = false;
            if (line_.empty() || line_ == "\r") continue;
            FeedEvent e;
            try {
                e = parse_event(line_);
            } catch (const ParseError& err) {
                throw FormatError(path_, lineno_, err.what());
            }
            if (auto v = validate_event(e)) throw FormatError(path_, lineno_, *v);
            if (e.ts < last_ts_)
                throw FormatError(path_, lineno_,
                                  "timestamps out of order (" + std::to_string(e.ts.ns) + " after " +
                                      std::to_string(last_ts_.ns) + ")");
            last_ts_ = e.ts;
            return e;
        }
    }

    std::string name() const override { return path_; }
    std::size_t position() const override { return lineno_; }

private:
    static constexpr std::size_t kBufferSize = 1 << 20;
    std::unique_ptr<char[]> buffer_ = std::make_unique<char[]>(kBufferSize);
    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::size_t lineno_ = 0;
    bool pending_ = false;
    std::optional<EventFileHeader> header_;
    Timestamp last_ts_{};
};

/// In-memory event list (tests, simulator hand-off). Order is checked like a file.
class VectorEventSource final : public EventSource {
public:
    explicit VectorEventSource(std::vector<FeedEvent> events, std::string name = "<memory>")
        : events_(std::move(events)), name_(std::move(name)) {}

    std::optional<FeedEvent> next() override {
        if (pos_ >= events_.size()) return std::nullopt;
        const FeedEvent& e = events_[pos_++];
        if (e.ts < last_) throw FormatError(name_, pos_, "timestamps out of order");
        last_ = e.ts;
        return e;
    }
    std::string name() const override { return name_; }
    std::size_t position() const override { return pos_; }

private:
    std::vector<FeedEvent> events_;
    std::string name_;
    std::size_t pos_ = 0;
    Timestamp last_{};
};

/// Buffered writer producing the text format.
class EventFileWriter {
public:
    EventFileWriter(const std::string& path, const std::optional<EventFileHeader>& header)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw InputError("cannot write " + path);
        if (header) {
            buf_ = format_header(*header);
            buf_.push_back('\n');
        }
    }
    ~EventFileWriter() {
        try {
            close();
        } catch (...) {
        }
    }
    EventFileWriter(const EventFileWriter&) = delete;
    EventFileWriter& operator=(const EventFileWriter&) = delete;

    void write(const FeedEvent& e) {
        append_event(buf_, e);
        buf_.push_back('\n');
        if (buf_.size() > (1u << 20)) flush();
    }

    void close() {
        if (!out_.is_open()) return;
        flush();
        out_.close();
    }

private:
    void flush() {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        if (!out_) throw InputError("write failed: " + path_);
        buf_.clear();
    }

    std::ofstream out_;
    std::string path_;
    std::string buf_;
};

/// Global time-ordered view over several individually sorted sources.
///
/// Events sharing a timestamp are emitted SIP first, then direct feeds by
/// exchange id, then by source index, preserving each source's own order
/// otherwise (a stable sort of the concatenation). Memory is bounded by the
/// largest same-timestamp group, not by the total event count.
class MergedStream {
public:
    explicit MergedStream(std::vector<std::unique_ptr<EventSource>> sources)
        : sources_(std::move(sources)), heads_(sources_.size()) {
        for (std::size_t i = 0; i < sources_.size(); ++i) heads_[i] = sources_[i]->next();
    }

    static MergedStream from_files(const std::vector<std::string>& paths) {
        std::vector<std::unique_ptr<EventSource>> s;
        for (const auto& p : paths) s.push_back(std::make_unique<EventFileReader>(p));
        return MergedStream(std::move(s));
    }

    std::optional<FeedEvent> next() {
        if (cursor_ == group_.size()) {
            if (!fill_group()) return std::nullopt;
        }
        return std::move(group_[cursor_++].event);
    }

    /// Next batch of events sharing one timestamp (empty at end of stream).
    std::vector<FeedEvent> next_group() {
        std::vector<FeedEvent> out;
        if (cursor_ == group_.size() && !fill_group()) return out;
        for (; cursor_ < group_.size(); ++cursor_) out.push_back(std::move(group_[cursor_].event));
        return out;
    }

private:
    struct Tagged {
        FeedEvent event;
        std::size_t source;
    };

    bool fill_group() {
        group_.clear();
        cursor_ = 0;
        std::optional<Timestamp> min_ts;
        for (const auto& h : heads_)
            if (h && (!min_ts || h->ts < *min_ts)) min_ts = h->ts;
        if (!min_ts) return false;
        for (std::size_t i = 0; i < heads_.size(); ++i) {
            while (heads_[i] && heads_[i]->ts == *min_ts) {
                group_.push_back({std::move(*heads_[i]), i});
                heads_[i] = sources_[i]->next();
            }
        }
        std::stable_sort(group_.begin(), group_.end(), [](const Tagged& a, const Tagged& b) {
            if (a.event.source != b.event.source) return a.event.source < b.event.source;
            return a.source < b.source;
        });
        return true;
    }

    std::vector<std::unique_ptr<EventSource>> sources_;
    std::vector<std::optional<FeedEvent>> heads_;
    std::vector<Tagged> group_;
    std::size_t cursor_ = 0;
};

/// Reads `ticker,market_cap,sector,category`. Duplicate tickers and unknown categories are errors.
inline std::map<Ticker, SymbolMeta> load_symbol_meta(const std::string& path) {
    const auto t = csv::Table::read(path);
    for (const char* col : {"ticker", "market_cap", "sector", "category"})
        if (!t.has(col)) throw FormatError(path, 1, std::string{"missing column '"} + col + "'");
    std::map<Ticker, SymbolMeta> out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto& tick = t.at(r, "ticker");
        if (!valid_ticker(tick)) throw FormatError(path, t.line_of(r), "invalid ticker '" + tick + "'");
        SymbolMeta m;
        m.ticker = Ticker{tick};
        if (const auto& mc = t.at(r, "market_cap"); !mc.empty()) {
            auto v = csv::to_double(mc);
            if (!v || *v <= 0) throw FormatError(path, t.line_of(r), "market_cap must be positive");
            m.market_cap = *v;
        }
        m.sector = t.at(r, "sector");
        auto cat = parse_category(t.at(r, "category"));
        if (!cat) throw FormatError(path, t.line_of(r), "unknown category '" + t.at(r, "category") + "'");
        m.category = *cat;
        if (!out.emplace(m.ticker, m).second)
            throw FormatError(path, t.line_of(r), "duplicate ticker '" + tick + "'");
    }
    return out;
}

inline void write_symbol_meta(const std::string& path, const std::map<Ticker, SymbolMeta>& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << "ticker,market_cap,sector,category\n";
    char buf[64];
    for (const auto& [t, m] : meta) {
        out << t.view() << ',';
        if (m.market_cap) {
            std::snprintf(buf, sizeof buf, "%.17g", *m.market_cap);
            out << buf;
        }
        out << ',' << m.sector << ',' << to_string(m.category) << '\n';
    }
}

}  // namespace dislo
