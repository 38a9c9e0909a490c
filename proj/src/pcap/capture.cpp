// casefile - offline artifact analysis workbench

#include <casefile/pcap/pcap.hpp>

#include <algorithm>
#include <charconv>
#include <map>

namespace casefile {

namespace {

constexpr std::uint32_t magic_usec = 0xA1B2C3D4u;
constexpr std::uint32_t magic_nsec = 0xA1B23C4Du;
constexpr std::uint32_t max_record = 256u << 20;

std::uint32_t bswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
}

std::uint16_t be16(const Bytes& f, std::size_t at) { return static_cast<std::uint16_t>((f[at] << 8) | f[at + 1]); }
std::uint32_t be32(const Bytes& f, std::size_t at) {
    return (std::uint32_t{f[at]} << 24) | (std::uint32_t{f[at + 1]} << 16) | (std::uint32_t{f[at + 2]} << 8) | f[at + 3];
}

struct Segment {
    std::uint32_t seq = 0;
    Bytes data;
    std::size_t arrival = 0;
};

struct HalfStream {
    std::optional<std::uint32_t> syn_seq;
    std::vector<Segment> segments;
};

struct Connection {
    Endpoint a, b; ///< a sent the first packet
    std::optional<bool> client_is_a;
    HalfStream from_a, from_b;
    std::size_t packets = 0;
};

void assemble(HalfStream& half, Direction dir, Bytes& out, std::vector<StreamGap>& gaps, std::size_t& dup) {
    std::vector<Segment*> data;
    for (auto& s : half.segments) {
        if (!s.data.empty()) data.push_back(&s);
    }
    if (data.empty()) return;
    std::uint32_t base;
    if (half.syn_seq) {
        base = *half.syn_seq + 1;
    } else {
        base = data.front()->seq;
        for (auto* s : data) {
            if (static_cast<std::int32_t>(s->seq - base) < 0) base = s->seq;
        }
    }
    struct Placed {
        std::uint64_t rel;
        ByteView bytes;
        std::size_t arrival;
    };
    std::vector<Placed> placed;
    for (auto* s : data) {
        const auto diff = static_cast<std::int32_t>(s->seq - base);
        ByteView bytes = s->data;
        std::uint64_t rel = 0;
        if (diff < 0) {
            const auto skip = static_cast<std::uint64_t>(-static_cast<std::int64_t>(diff));
            if (skip >= bytes.size()) {
                dup += bytes.size();
                continue;
            }
            bytes = bytes.subspan(skip);
            dup += skip;
        } else {
            rel = static_cast<std::uint64_t>(diff);
        }
        placed.push_back({rel, bytes, s->arrival});
    }
    std::stable_sort(placed.begin(), placed.end(), [](const Placed& x, const Placed& y) {
        return x.rel != y.rel ? x.rel < y.rel : x.arrival < y.arrival;
    });
    std::uint64_t cursor = 0;
    for (const auto& p : placed) {
        const auto end = p.rel + p.bytes.size();
        if (end <= cursor) {
            dup += p.bytes.size();
            continue;
        }
        if (p.rel > cursor) {
            gaps.push_back({dir, out.size(), p.rel - cursor});
            cursor = p.rel;
        }
        const auto skip = cursor - p.rel;
        dup += skip;
        out.insert(out.end(), p.bytes.begin() + static_cast<std::ptrdiff_t>(skip), p.bytes.end());
        cursor = end;
    }
}

} // namespace

std::string ipv4_to_string(std::uint32_t ip) {
    return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xFF) + "." + std::to_string((ip >> 8) & 0xFF) +
           "." + std::to_string(ip & 0xFF);
}

std::string Endpoint::to_string() const { return ipv4_to_string(ip) + ":" + std::to_string(port); }

std::string StreamKey::to_string() const { return client.to_string() + "-" + server.to_string(); }

namespace {

Endpoint parse_endpoint(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw Error(Errc::invalid_argument, "endpoint needs ip:port");
    std::uint32_t ip = 0;
    auto host = text.substr(0, colon);
    for (int part = 0; part < 4; ++part) {
        auto dot = host.find('.');
        auto piece = host.substr(0, dot);
        unsigned v = 0;
        auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
        if (ec != std::errc{} || p != piece.data() + piece.size() || v > 255 || (dot == std::string_view::npos) != (part == 3)) {
            throw Error(Errc::invalid_argument, "bad IPv4 address in stream key: " + std::string(text));
        }
        ip = (ip << 8) | v;
        if (dot != std::string_view::npos) host.remove_prefix(dot + 1);
    }
    auto port_text = text.substr(colon + 1);
    unsigned port = 0;
    auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || p != port_text.data() + port_text.size() || port > 65535) {
        throw Error(Errc::invalid_argument, "bad port in stream key: " + std::string(text));
    }
    return {ip, static_cast<std::uint16_t>(port)};
}

} // namespace

StreamKey StreamKey::parse(std::string_view text) {
    // The separator is the '-' after the first port.
    auto first_colon = text.find(':');
    auto dash = first_colon == std::string_view::npos ? first_colon : text.find('-', first_colon);
    if (dash == std::string_view::npos) throw Error(Errc::invalid_argument, "stream key needs ip:port-ip:port");
    return {parse_endpoint(text.substr(0, dash)), parse_endpoint(text.substr(dash + 1))};
}

const char* to_string(Direction d) noexcept {
    return d == Direction::client_to_server ? "client" : "server";
}

std::uint64_t TcpStream::contiguous_length(Direction d) const noexcept {
    for (const auto& g : gaps) {
        if (g.direction == d) return g.offset;
    }
    return payload(d).size();
}

bool looks_like_pcapng(ByteView data) noexcept { return starts_with(data, {0x0A, 0x0D, 0x0D, 0x0A}); }

bool looks_like_pcap(ByteView data) noexcept {
    if (data.size() < 4) return false;
    const std::uint32_t m = static_cast<std::uint32_t>(data[0]) | (data[1] << 8) | (data[2] << 16) |
                            (static_cast<std::uint32_t>(data[3]) << 24);
    return m == magic_usec || m == magic_nsec || m == bswap32(magic_usec) || m == bswap32(magic_nsec);
}

PacketCapture parse_pcap(ByteView data) {
    if (looks_like_pcapng(data)) throw Error(Errc::unsupported, "pcapng captures are not supported (classic PCAP only)");
    if (!looks_like_pcap(data)) throw Error(Errc::bad_format, "bad PCAP magic");
    if (data.size() < 24) throw Error(Errc::bad_format, "PCAP global header is truncated");
    PacketCapture c;
    const std::uint32_t m = load_le32(data, 0);
    c.swapped = m == bswap32(magic_usec) || m == bswap32(magic_nsec);
    c.nanosecond = m == magic_nsec || m == bswap32(magic_nsec);
    auto u16 = [&](std::size_t at) { return c.swapped ? load_be16(data, at) : load_le16(data, at); };
    auto u32 = [&](std::size_t at) { return c.swapped ? load_be32(data, at) : load_le32(data, at); };
    c.version_major = u16(4);
    c.version_minor = u16(6);
    c.snaplen = u32(16);
    c.link_type = u32(20) & 0x0FFFFFFFu;
    if (c.link_type != linktype_ethernet) {
        throw Error(Errc::unsupported, "unsupported link type " + std::to_string(c.link_type) + " (Ethernet only)");
    }
    std::size_t at = 24;
    while (at < data.size()) {
        if (data.size() - at < 16) {
            c.warnings.push_back("truncated record header at offset " + std::to_string(at) + " dropped");
            break;
        }
        PcapRecord r;
        r.ts_sec = u32(at);
        r.ts_frac = u32(at + 4);
        r.captured_length = u32(at + 8);
        r.original_length = u32(at + 12);
        if (r.captured_length > max_record) {
            c.warnings.push_back("implausible record length at offset " + std::to_string(at) + "; parsing stopped");
            break;
        }
        if (!in_bounds(data, at + 16, r.captured_length)) {
            c.warnings.push_back("truncated final record at offset " + std::to_string(at) + " dropped");
            break;
        }
        if (r.captured_length > r.original_length) {
            c.warnings.push_back("record at offset " + std::to_string(at) + " captured more than its original length");
        }
        auto frame = slice(data, at + 16, r.captured_length);
        r.frame.assign(frame.begin(), frame.end());
        c.records.push_back(std::move(r));
        at += 16 + static_cast<std::size_t>(c.records.back().captured_length);
    }
    return c;
}

std::vector<TcpStream> reassemble(const PacketCapture& capture, ReassemblyStats* stats_out) {
    ReassemblyStats stats;
    std::vector<Connection> conns;
    std::map<std::pair<Endpoint, Endpoint>, std::size_t> index;
    std::size_t arrival = 0;
    for (const auto& rec : capture.records) {
        ++stats.frames;
        const auto& f = rec.frame;
        if (f.size() < 14) {
            ++stats.malformed;
            continue;
        }
        std::size_t at = 12;
        std::uint16_t ethertype = be16(f, at);
        while ((ethertype == 0x8100 || ethertype == 0x88A8) && at + 6 <= f.size()) {
            at += 4;
            ethertype = be16(f, at);
        }
        at += 2;
        if (ethertype == 0x86DD) {
            ++stats.ipv6_skipped;
            continue;
        }
        if (ethertype != 0x0800) {
            ++stats.non_tcp;
            continue;
        }
        if (f.size() < at + 20 || (f[at] >> 4) != 4) {
            ++stats.malformed;
            continue;
        }
        const std::size_t ihl = std::size_t{f[at] & 0x0Fu} * 4;
        const std::size_t total = be16(f, at + 2);
        const std::uint16_t frag = be16(f, at + 6);
        const std::uint8_t proto = f[at + 9];
        if (ihl < 20 || total < ihl || at + ihl > f.size()) {
            ++stats.malformed;
            continue;
        }
        if (proto != 6) {
            ++stats.non_tcp;
            continue;
        }
        if ((frag & 0x2000) || (frag & 0x1FFF)) {
            ++stats.fragments_skipped;
            continue;
        }
        const std::uint32_t src_ip = be32(f, at + 12);
        const std::uint32_t dst_ip = be32(f, at + 16);
        const std::size_t ip_end = std::min(f.size(), at + total);
        const std::size_t tcp = at + ihl;
        if (tcp + 20 > ip_end) {
            ++stats.malformed;
            continue;
        }
        const std::size_t data_off = std::size_t{static_cast<std::uint8_t>(f[tcp + 12] >> 4)} * 4;
        if (data_off < 20 || tcp + data_off > ip_end) {
            ++stats.malformed;
            continue;
        }
        ++stats.tcp_segments;
        const Endpoint src{src_ip, be16(f, tcp)};
        const Endpoint dst{dst_ip, be16(f, tcp + 2)};
        const std::uint32_t seq = be32(f, tcp + 4);
        const std::uint8_t flags = f[tcp + 13];
        const bool syn = flags & 0x02;
        const bool ack = flags & 0x10;

        auto key = src < dst ? std::make_pair(src, dst) : std::make_pair(dst, src);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, conns.size()).first;
            conns.push_back({src, dst, std::nullopt, {}, {}, 0});
        }
        auto& c = conns[it->second];
        ++c.packets;
        const bool from_a = src == c.a;
        auto& half = from_a ? c.from_a : c.from_b;
        if (syn) {
            if (!half.syn_seq) half.syn_seq = seq;
            if (!ack && !c.client_is_a) c.client_is_a = from_a;
            if (ack && !c.client_is_a) c.client_is_a = !from_a;
        }
        Segment s;
        s.seq = syn ? seq + 1 : seq;
        s.data.assign(f.begin() + static_cast<std::ptrdiff_t>(tcp + data_off), f.begin() + static_cast<std::ptrdiff_t>(ip_end));
        s.arrival = arrival++;
        if (!s.data.empty()) half.segments.push_back(std::move(s));
    }

    std::vector<TcpStream> streams;
    for (auto& c : conns) {
        const bool a_is_client = c.client_is_a.value_or(true);
        TcpStream s;
        s.key = a_is_client ? StreamKey{c.a, c.b} : StreamKey{c.b, c.a};
        s.packets = c.packets;
        auto& client = a_is_client ? c.from_a : c.from_b;
        auto& server = a_is_client ? c.from_b : c.from_a;
        assemble(client, Direction::client_to_server, s.client_payload, s.gaps, s.duplicate_bytes);
        assemble(server, Direction::server_to_client, s.server_payload, s.gaps, s.duplicate_bytes);
        streams.push_back(std::move(s));
    }
    if (stats_out) *stats_out = stats;
    return streams;
}

std::vector<PayloadMatch> search_payloads(const std::vector<TcpStream>& streams, ByteView needle) {
    if (needle.empty()) throw Error(Errc::invalid_argument, "search needle is empty");
    std::vector<PayloadMatch> out;
    for (const auto& s : streams) {
        for (auto d : {Direction::client_to_server, Direction::server_to_client}) {
            PayloadMatch m{s.key, d, {}};
            const auto& p = s.payload(d);
            for (auto pos = find_bytes(p, needle); pos != static_cast<std::size_t>(-1); pos = find_bytes(p, needle, pos + 1)) {
                m.offsets.push_back(pos);
            }
            if (!m.offsets.empty()) out.push_back(std::move(m));
        }
    }
    return out;
}

std::vector<PayloadMatch> search_payloads(const PacketCapture& capture, ByteView needle) {
    return search_payloads(reassemble(capture), needle);
}

std::vector<SecurityHint> pcap_hints(const PacketCapture& capture, const std::vector<TcpStream>& streams) {
    std::vector<SecurityHint> hints;
    for (const auto& w : capture.warnings) hints.push_back({Severity::info, w, 0});
    for (const auto& s : streams) {
        if (!s.gaps.empty()) {
            hints.push_back({Severity::info, "stream " + s.key.to_string() + " has " + std::to_string(s.gaps.size()) +
                                                 " missing segment ranges", 0});
        }
    }
    return hints;
}

const TcpStream* CaptureModel::find(const StreamKey& key) const noexcept {
    for (const auto& s : streams) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

CaptureModel analyze_capture(ByteView data) {
    CaptureModel m;
    m.capture = parse_pcap(data);
    m.streams = reassemble(m.capture, &m.stats);
    for (const auto& s : m.streams) m.transactions.push_back(http_transactions(s));
    return m;
}

} // namespace casefile
