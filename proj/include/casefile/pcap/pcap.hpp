// casefile - offline artifact analysis workbench
// Classic PCAP captures, TCP stream reassembly, HTTP transactions and
// payload search over reassembled streams.

#pragma once

#include <casefile/core/bytes.hpp>
#include <casefile/engine/identification.hpp>

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace casefile {

inline constexpr std::uint32_t linktype_ethernet = 1;

struct PcapRecord {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_frac = 0; ///< micro- or nanoseconds
    std::uint32_t captured_length = 0;
    std::uint32_t original_length = 0;
    Bytes frame;
};

struct PacketCapture {
    bool swapped = false; ///< header fields are big-endian relative to the magic
    bool nanosecond = false;
    std::uint16_t version_major = 0;
    std::uint16_t version_minor = 0;
    std::uint32_t snaplen = 0;
    std::uint32_t link_type = 0;
    std::vector<PcapRecord> records;
    std::vector<std::string> warnings;
};

bool looks_like_pcap(ByteView data) noexcept;
bool looks_like_pcapng(ByteView data) noexcept;

/// Throws bad_format for a bad magic, unsupported for pcapng or a link type
/// other than Ethernet. A truncated final record is dropped with a warning.
PacketCapture parse_pcap(ByteView data);

struct Endpoint {
    std::uint32_t ip = 0; ///< host order
    std::uint16_t port = 0;

    std::string to_string() const;
    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

std::string ipv4_to_string(std::uint32_t ip);

struct StreamKey {
    Endpoint client;
    Endpoint server;

    /// "10.0.0.5:49152-93.184.216.34:80"
    std::string to_string() const;
    static StreamKey parse(std::string_view text);
    friend auto operator<=>(const StreamKey&, const StreamKey&) = default;
};

enum class Direction { client_to_server, server_to_client };

const char* to_string(Direction d) noexcept;

struct StreamGap {
    Direction direction = Direction::client_to_server;
    std::uint64_t offset = 0; ///< payload position where bytes are missing
    std::uint64_t length = 0; ///< number of missing sequence numbers
};

struct TcpStream {
    StreamKey key;
    Bytes client_payload;
    Bytes server_payload;
    std::vector<StreamGap> gaps;
    std::size_t packets = 0;
    std::size_t duplicate_bytes = 0;

    const Bytes& payload(Direction d) const noexcept {
        return d == Direction::client_to_server ? client_payload : server_payload;
    }
    /// Bytes before the first gap in a direction.
    std::uint64_t contiguous_length(Direction d) const noexcept;
};

struct ReassemblyStats {
    std::size_t frames = 0;
    std::size_t tcp_segments = 0;
    std::size_t non_tcp = 0;
    std::size_t ipv6_skipped = 0;
    std::size_t fragments_skipped = 0;
    std::size_t malformed = 0;
};

/// One stream per connection (both directions merged), in order of first
/// appearance. Segments are ordered by sequence number with 32-bit serial
/// arithmetic; overlapping bytes keep the first copy seen.
std::vector<TcpStream> reassemble(const PacketCapture& capture, ReassemblyStats* stats = nullptr);

struct HttpHeader {
    std::string name;
    std::string value;
};

struct HttpTransaction {
    std::string method;
    std::string target;
    std::string version;
    std::vector<HttpHeader> request_headers;
    ByteRange request_body_raw; ///< into the client payload
    bool has_response = false;
    int status_code = 0;
    std::string reason;
    std::string response_version;
    std::vector<HttpHeader> response_headers;
    ByteRange body_raw; ///< into the server payload
    Bytes body_decoded;
    std::vector<std::string> notes;

    std::optional<std::string> request_header(std::string_view name) const;
    std::optional<std::string> response_header(std::string_view name) const;
    std::string label() const; ///< "GET /path"
};

/// Requests and responses paired in order, up to the first gap. A stream
/// whose first request or status line is malformed yields nothing.
std::vector<HttpTransaction> http_transactions(const TcpStream& stream);

/// Dechunks a chunked body. Sets `complete` false when the input ends early.
Bytes decode_chunked(ByteView body, bool* complete = nullptr);

/// gzip / deflate (zlib or raw) decoding; throws bad_format on corrupt input.
Bytes decode_content(ByteView body, std::string_view encoding);

struct PayloadMatch {
    StreamKey key;
    Direction direction = Direction::client_to_server;
    std::vector<std::uint64_t> offsets;
};

std::vector<PayloadMatch> search_payloads(const std::vector<TcpStream>& streams, ByteView needle);
std::vector<PayloadMatch> search_payloads(const PacketCapture& capture, ByteView needle);

std::vector<SecurityHint> pcap_hints(const PacketCapture& capture, const std::vector<TcpStream>& streams);

/// Parsed capture plus its streams, as stored on a PCAP node.
struct CaptureModel {
    PacketCapture capture;
    std::vector<TcpStream> streams;
    std::vector<std::vector<HttpTransaction>> transactions; ///< per stream
    ReassemblyStats stats;

    const TcpStream* find(const StreamKey& key) const noexcept;
};

CaptureModel analyze_capture(ByteView data);

} // namespace casefile
