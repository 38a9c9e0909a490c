// casefile - offline artifact analysis workbench

#include <casefile/pcap/pcap.hpp>

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace casefile {

namespace {

constexpr std::uint64_t max_decoded_body = 512ull << 20;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<std::string> find_header(const std::vector<HttpHeader>& headers, std::string_view name) {
    const auto key = lower(name);
    for (const auto& h : headers) {
        if (lower(h.name) == key) return h.value;
    }
    return std::nullopt;
}

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    /// Next line without its terminator, or nullopt at end of input.
    std::optional<std::string_view> line() {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) return std::nullopt;
        auto l = text.substr(pos, nl - pos);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        pos = nl + 1;
        return l;
    }
};

bool read_headers(Cursor& c, std::vector<HttpHeader>& out) {
    while (auto l = c.line()) {
        if (l->empty()) return true;
        auto colon = l->find(':');
        if (colon == std::string_view::npos || colon == 0) return false;
        out.push_back({std::string(trim(l->substr(0, colon))), std::string(trim(l->substr(colon + 1)))});
    }
    return false;
}

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("!#$%&'*+-.^_`|~").find(c) != std::string_view::npos;
}

std::optional<std::uint64_t> parse_length(const std::optional<std::string>& v) {
    if (!v) return std::nullopt;
    std::uint64_t n = 0;
    auto s = trim(*v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return n;
}

bool chunked(const std::vector<HttpHeader>& headers) {
    auto te = find_header(headers, "Transfer-Encoding");
    return te && lower(*te).find("chunked") != std::string::npos;
}

/// Length of a chunked body starting at `at`, or the remaining length when
/// the terminating chunk is missing.
std::uint64_t chunked_extent(std::string_view text, std::size_t at) {
    Cursor c{text, at};
    while (true) {
        auto size_line = c.line();
        if (!size_line) return text.size() - at;
        auto hex = trim(size_line->substr(0, size_line->find(';')));
        std::uint64_t n = 0;
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), n, 16);
        if (ec != std::errc{} || hex.empty()) return text.size() - at;
        if (n == 0) {
            while (auto trailer = c.line()) {
                if (trailer->empty()) return c.pos - at;
            }
            return text.size() - at;
        }
        if (c.pos + n > text.size()) return text.size() - at;
        c.pos += n;
        if (!c.line()) return text.size() - at;
    }
}

} // namespace

Bytes decode_chunked(ByteView body, bool* complete) {
    Bytes out;
    Cursor c{as_chars(body), 0};
    if (complete) *complete = false;
    while (true) {
        auto size_line = c.line();
        if (!size_line) return out;
        auto hex = trim(size_line->substr(0, size_line->find(';')));
        std::uint64_t n = 0;
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), n, 16);
        if (ec != std::errc{} || hex.empty() || p != hex.data() + hex.size()) return out;
        if (n == 0) {
            if (complete) *complete = true;
            return out;
        }
        const auto take = std::min<std::uint64_t>(n, body.size() - c.pos);
        out.insert(out.end(), body.begin() + static_cast<std::ptrdiff_t>(c.pos),
                   body.begin() + static_cast<std::ptrdiff_t>(c.pos + take));
        c.pos += take;
        if (take < n || !c.line()) return out;
    }
}

Bytes decode_content(ByteView body, std::string_view encoding) {
    const auto enc = lower(trim(encoding));
    if (enc.empty() || enc == "identity") return Bytes(body.begin(), body.end());
    std::vector<int> window_bits;
    if (enc == "gzip" || enc == "x-gzip") window_bits = {16 + MAX_WBITS};
    else if (enc == "deflate") window_bits = {MAX_WBITS, -MAX_WBITS};
    else throw Error(Errc::unsupported, "unsupported content encoding " + enc);
    for (int wb : window_bits) {
        z_stream zs{};
        if (inflateInit2(&zs, wb) != Z_OK) continue;
        Bytes out;
        zs.next_in = const_cast<Bytef*>(body.data());
        zs.avail_in = static_cast<uInt>(body.size());
        int rc = Z_OK;
        std::uint8_t buf[16384];
        while (rc == Z_OK) {
            zs.next_out = buf;
            zs.avail_out = sizeof buf;
            rc = inflate(&zs, Z_NO_FLUSH);
            out.insert(out.end(), buf, buf + (sizeof buf - zs.avail_out));
            if (out.size() > max_decoded_body) rc = Z_MEM_ERROR;
            if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;
        }
        inflateEnd(&zs);
        if (rc == Z_STREAM_END) return out;
    }
    throw Error(Errc::bad_format, "corrupt " + enc + " body");
}

std::optional<std::string> HttpTransaction::request_header(std::string_view name) const {
    return find_header(request_headers, name);
}

std::optional<std::string> HttpTransaction::response_header(std::string_view name) const {
    return find_header(response_headers, name);
}

std::string HttpTransaction::label() const { return method + " " + target; }

std::vector<HttpTransaction> http_transactions(const TcpStream& stream) {
    std::vector<HttpTransaction> out;
    const auto client_len = stream.contiguous_length(Direction::client_to_server);
    const auto server_len = stream.contiguous_length(Direction::server_to_client);
    const std::string_view client = as_chars(ByteView(stream.client_payload).first(client_len));
    const std::string_view server = as_chars(ByteView(stream.server_payload).first(server_len));

    Cursor req{client, 0};
    while (req.pos < client.size()) {
        auto line = req.line();
        if (!line) break;
        auto sp1 = line->find(' ');
        auto sp2 = line->rfind(' ');
        if (sp1 == std::string_view::npos || sp2 == sp1) break;
        auto method = line->substr(0, sp1);
        auto version = line->substr(sp2 + 1);
        if (method.empty() || !std::all_of(method.begin(), method.end(), is_token_char) || version.rfind("HTTP/", 0) != 0) {
            break;
        }
        HttpTransaction t;
        t.method = std::string(method);
        t.target = std::string(line->substr(sp1 + 1, sp2 - sp1 - 1));
        t.version = std::string(version);
        if (!read_headers(req, t.request_headers)) break;
        std::uint64_t body_len = 0;
        if (chunked(t.request_headers)) body_len = chunked_extent(client, req.pos);
        else if (auto n = parse_length(t.request_header("Content-Length"))) body_len = std::min<std::uint64_t>(*n, client.size() - req.pos);
        t.request_body_raw = {req.pos, body_len};
        req.pos += body_len;
        out.push_back(std::move(t));
    }
    if (out.empty()) return out;

    Cursor resp{server, 0};
    std::size_t i = 0;
    while (i < out.size() && resp.pos < server.size()) {
        auto line = resp.line();
        if (!line) break;
        // Status line: HTTP/x.y SP code [SP reason]
        auto sp1 = line->find(' ');
        int code = 0;
        bool ok = line->rfind("HTTP/", 0) == 0 && sp1 != std::string_view::npos && line->size() >= sp1 + 4;
        if (ok) {
            auto code_text = line->substr(sp1 + 1, 3);
            auto [p, ec] = std::from_chars(code_text.data(), code_text.data() + 3, code);
            ok = ec == std::errc{} && p == code_text.data() + 3 && code >= 100 && code <= 999 &&
                 (line->size() == sp1 + 4 || (*line)[sp1 + 4] == ' ');
        }
        if (!ok) {
            if (i == 0) return {}; // not HTTP after all
            out[i].notes.push_back("malformed status line; pairing stopped");
            break;
        }
        std::vector<HttpHeader> headers;
        if (!read_headers(resp, headers)) {
            out[i].notes.push_back("response headers are incomplete");
            break;
        }
        if (code >= 100 && code < 200) continue; // interim response
        auto& t = out[i++];
        t.has_response = true;
        t.status_code = code;
        t.response_version = std::string(line->substr(0, sp1));
        t.reason = line->size() > sp1 + 5 ? std::string(line->substr(sp1 + 5)) : std::string();
        t.response_headers = std::move(headers);
        const bool no_body = t.method == "HEAD" || code == 204 || code == 304;
        std::uint64_t len = 0;
        Bytes body;
        if (no_body) {
            len = 0;
        } else if (chunked(t.response_headers)) {
            len = chunked_extent(server, resp.pos);
            bool complete = false;
            body = decode_chunked(ByteView(stream.server_payload).subspan(resp.pos, len), &complete);
            if (!complete) t.notes.push_back("chunked body ends early");
        } else if (auto n = parse_length(t.response_header("Content-Length"))) {
            len = std::min<std::uint64_t>(*n, server.size() - resp.pos);
            if (len < *n) t.notes.push_back("body shorter than Content-Length");
        } else {
            len = server.size() - resp.pos; // delimited by connection close
        }
        t.body_raw = {resp.pos, len};
        if (!chunked(t.response_headers)) {
            auto raw = ByteView(stream.server_payload).subspan(resp.pos, len);
            body.assign(raw.begin(), raw.end());
        }
        resp.pos += len;
        if (auto enc = t.response_header("Content-Encoding")) {
            try {
                body = decode_content(body, *enc);
            } catch (const Error& e) {
                t.notes.push_back(std::string("content decoding failed: ") + e.what());
            }
        }
        t.body_decoded = std::move(body);
    }
    return out;
}

} // namespace casefile
