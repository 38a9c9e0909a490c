// casefile - offline artifact analysis workbench

#include <casefile/extract/artifacts.hpp>

#include <casefile/extract/digest.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace casefile {

const char* to_string(ArtifactKind kind) noexcept {
    switch (kind) {
    case ArtifactKind::url: return "Url";
    case ArtifactKind::email_address: return "EmailAddress";
    case ArtifactKind::ip_address: return "IpAddress";
    case ArtifactKind::registry_key: return "RegistryKey";
    case ArtifactKind::wallet: return "Wallet";
    case ArtifactKind::file_path: return "FilePath";
    case ArtifactKind::base64_blob: return "Base64Blob";
    }
    return "?";
}

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_domain_label(std::string_view label) {
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    return std::all_of(label.begin(), label.end(), [](char c) { return is_alnum(c) || c == '-'; });
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

bool is_hostname(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    auto labels = split(host, '.');
    return std::all_of(labels.begin(), labels.end(), is_domain_label);
}

bool is_url_char(char c) {
    static constexpr std::string_view extra = "-._~:/?#[]@!$&'()*+,;=%";
    return is_alnum(c) || extra.find(c) != std::string_view::npos;
}

std::string url_host(std::string_view s) {
    auto rest = s.substr(s.find("://") + 3);
    auto end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, end);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        return lower(authority.substr(1, close == std::string_view::npos ? std::string_view::npos : close - 1));
    }
    if (auto colon = authority.find(':'); colon != std::string_view::npos) authority = authority.substr(0, colon);
    return lower(authority);
}

constexpr std::string_view base58_alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
constexpr std::string_view bech32_charset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";

std::optional<std::vector<std::uint8_t>> base58_decode(std::string_view s) {
    std::vector<std::uint8_t> num; // big-endian magnitude
    for (char c : s) {
        auto digit = base58_alphabet.find(c);
        if (digit == std::string_view::npos) return std::nullopt;
        unsigned carry = static_cast<unsigned>(digit);
        for (auto it = num.rbegin(); it != num.rend(); ++it) {
            carry += 58u * *it;
            *it = static_cast<std::uint8_t>(carry & 0xFF);
            carry >>= 8;
        }
        while (carry) {
            num.insert(num.begin(), static_cast<std::uint8_t>(carry & 0xFF));
            carry >>= 8;
        }
    }
    std::size_t zeros = 0;
    while (zeros < s.size() && s[zeros] == '1') ++zeros;
    std::vector<std::uint8_t> out(zeros, 0);
    out.insert(out.end(), num.begin(), num.end());
    return out;
}

std::uint32_t bech32_polymod(const std::vector<std::uint8_t>& values) {
    static constexpr std::array<std::uint32_t, 5> gen{0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
    std::uint32_t chk = 1;
    for (auto v : values) {
        auto top = chk >> 25;
        chk = ((chk & 0x1ffffff) << 5) ^ v;
        for (int i = 0; i < 5; ++i) {
            if ((top >> i) & 1) chk ^= gen[static_cast<std::size_t>(i)];
        }
    }
    return chk;
}

bool is_posix_path(std::string_view s) {
    if (s.size() < 2 || s.front() != '/') return false;
    auto body = s.substr(1);
    if (!body.empty() && body.back() == '/') body.remove_suffix(1);
    auto segments = split(body, '/');
    if (segments.size() < 2) return false;
    for (auto seg : segments) {
        if (seg.empty()) return false;
        for (char c : seg) {
            if (!(is_alnum(c) || c == '.' || c == '_' || c == '-' || c == '~' || c == '+' || c == '@')) return false;
        }
    }
    return true;
}

bool is_windows_path_tail(std::string_view tail) {
    if (tail.empty()) return false;
    for (char c : tail) {
        auto u = static_cast<unsigned char>(c);
        if (u < 0x20 || u >= 0x7F) return false;
        if (std::string_view("<>\"|?*").find(c) != std::string_view::npos) return false;
    }
    return true;
}

} // namespace

bool is_url(std::string_view s) {
    auto sep = s.find("://");
    if (sep == std::string_view::npos) return false;
    auto scheme = lower(s.substr(0, sep));
    if (scheme != "http" && scheme != "https" && scheme != "ftp") return false;
    auto rest = s.substr(sep + 3);
    if (!std::all_of(rest.begin(), rest.end(), is_url_char)) return false;
    auto end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, end);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
    if (authority.empty()) return false;
    if (authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos || close == 1) return false;
        auto inner = authority.substr(1, close - 1);
        if (!std::all_of(inner.begin(), inner.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.'; })) return false;
        authority.remove_prefix(close + 1);
        if (authority.empty()) return true;
        if (authority.front() != ':') return false;
        authority.remove_prefix(1);
    } else {
        auto colon = authority.find(':');
        auto host = authority.substr(0, colon);
        if (!is_ipv4_address(host) && !is_hostname(host)) return false;
        if (colon == std::string_view::npos) return true;
        authority.remove_prefix(colon + 1);
    }
    // port
    if (authority.empty() || authority.size() > 5) return false;
    unsigned port = 0;
    auto [p, ec] = std::from_chars(authority.data(), authority.data() + authority.size(), port);
    return ec == std::errc() && p == authority.data() + authority.size() && port <= 65535;
}

bool is_email_address(std::string_view s) {
    auto at = s.find('@');
    if (at == std::string_view::npos || at == 0 || s.find('@', at + 1) != std::string_view::npos) return false;
    auto local = s.substr(0, at);
    auto domain = s.substr(at + 1);
    if (local.front() == '.' || local.back() == '.') return false;
    if (!std::all_of(local.begin(), local.end(), [](char c) {
            return is_alnum(c) || std::string_view("._%+-").find(c) != std::string_view::npos;
        })) {
        return false;
    }
    auto labels = split(domain, '.');
    if (labels.size() < 2 || !std::all_of(labels.begin(), labels.end(), is_domain_label)) return false;
    auto tld = labels.back();
    return tld.size() >= 2 && std::all_of(tld.begin(), tld.end(), is_alpha);
}

bool is_ipv4_address(std::string_view s) {
    auto parts = split(s, '.');
    if (parts.size() != 4) return false;
    for (auto p : parts) {
        if (p.empty() || p.size() > 3 || !std::all_of(p.begin(), p.end(), is_digit)) return false;
        if (p.size() > 1 && p.front() == '0') return false;
        unsigned v = 0;
        std::from_chars(p.data(), p.data() + p.size(), v);
        if (v > 255) return false;
    }
    return true;
}

bool is_private_ipv4(std::string_view s) {
    if (!is_ipv4_address(s)) return false;
    auto parts = split(s, '.');
    unsigned a = 0, b = 0;
    std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), a);
    std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), b);
    return a == 10 || a == 127 || a == 0 || (a == 172 && b >= 16 && b <= 31) || (a == 192 && b == 168) ||
           (a == 169 && b == 254) || a >= 224;
}

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> registry_hives{{
    {"hkey_local_machine", "HKEY_LOCAL_MACHINE"},
    {"hkey_current_user", "HKEY_CURRENT_USER"},
    {"hkey_classes_root", "HKEY_CLASSES_ROOT"},
    {"hkcu", "HKEY_CURRENT_USER"},
    {"hklm", "HKEY_LOCAL_MACHINE"},
}};

std::optional<std::string> normalize_registry_key(std::string_view s) {
    auto slash = s.find('\\');
    if (slash == std::string_view::npos || slash + 1 >= s.size()) return std::nullopt;
    auto hive = lower(s.substr(0, slash));
    for (auto [name, canonical] : registry_hives) {
        if (hive != name) continue;
        auto tail = s.substr(slash + 1);
        for (char c : tail) {
            auto u = static_cast<unsigned char>(c);
            if (u < 0x20 || u >= 0x7F) return std::nullopt;
        }
        return std::string(canonical) + "\\" + std::string(tail);
    }
    return std::nullopt;
}

} // namespace

bool is_registry_key(std::string_view s) { return normalize_registry_key(s).has_value(); }

bool is_base58check_address(std::string_view s) {
    if (s.size() < 26 || s.size() > 35 || (s.front() != '1' && s.front() != '3')) return false;
    auto decoded = base58_decode(s);
    if (!decoded || decoded->size() != 25) return false;
    const std::uint8_t version = (*decoded)[0];
    if ((s.front() == '1' && version != 0x00) || (s.front() == '3' && version != 0x05)) return false;
    ByteView payload(decoded->data(), 21);
    auto first = sha256(payload);
    auto second = sha256(first);
    return std::equal(second.begin(), second.begin() + 4, decoded->begin() + 21);
}

bool is_bech32_address(std::string_view s) {
    if (s.size() < 14 || s.size() > 74) return false;
    bool has_lower = std::any_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
    bool has_upper = std::any_of(s.begin(), s.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
    if (has_lower && has_upper) return false;
    auto l = lower(s);
    if (l.rfind("bc1", 0) != 0) return false;
    std::vector<std::uint8_t> values{3, 3, 0, 2, 3}; // expanded hrp "bc"
    for (std::size_t i = 3; i < l.size(); ++i) {
        auto v = bech32_charset.find(l[i]);
        if (v == std::string_view::npos) return false;
        values.push_back(static_cast<std::uint8_t>(v));
    }
    auto chk = bech32_polymod(values);
    return chk == 1 || chk == 0x2bc830a3;
}

bool is_wallet_address(std::string_view s) { return is_base58check_address(s) || is_bech32_address(s); }

bool is_file_path(std::string_view s) {
    if (s.size() >= 4 && is_alpha(s[0]) && s[1] == ':' && s[2] == '\\') return is_windows_path_tail(s.substr(3));
    if (s.size() >= 5 && s[0] == '\\' && s[1] == '\\') {
        auto rest = s.substr(2);
        auto slash = rest.find('\\');
        if (slash == std::string_view::npos || slash == 0) return false;
        auto server = rest.substr(0, slash);
        if (!std::all_of(server.begin(), server.end(), [](char c) { return is_alnum(c) || c == '.' || c == '-' || c == '_'; })) return false;
        return is_windows_path_tail(rest.substr(slash + 1));
    }
    if (s.size() >= 4 && s[0] == '%') {
        auto close = s.find('%', 1);
        if (close == std::string_view::npos || close == 1 || close + 1 >= s.size() || s[close + 1] != '\\') return false;
        auto var = s.substr(1, close - 1);
        if (!std::all_of(var.begin(), var.end(), [](char c) { return is_alnum(c) || c == '_' || c == '(' || c == ')'; })) return false;
        return is_windows_path_tail(s.substr(close + 2));
    }
    return is_posix_path(s);
}

bool is_base64_blob(std::string_view s) {
    if (s.size() < 24 || s.size() % 4 != 0) return false;
    std::size_t pad = 0;
    while (pad < 2 && !s.empty() && s[s.size() - 1 - pad] == '=') ++pad;
    auto body = s.substr(0, s.size() - pad);
    auto is_b64 = [](char c) { return is_alnum(c) || c == '+' || c == '/'; };
    if (!std::all_of(body.begin(), body.end(), is_b64)) return false;
    // canonical encoding: the bits dropped by padding must be zero
    auto value = [](char c) -> unsigned {
        if (c >= 'A' && c <= 'Z') return static_cast<unsigned>(c - 'A');
        if (c >= 'a' && c <= 'z') return static_cast<unsigned>(c - 'a' + 26);
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0' + 52);
        return c == '+' ? 62u : 63u;
    };
    if (pad == 1 && (value(body.back()) & 0x3) != 0) return false;
    if (pad == 2 && (value(body.back()) & 0xF) != 0) return false;
    return true;
}

std::optional<Classification> classify_string(std::string_view raw) {
    auto s = trim(raw);
    if (s.empty()) return std::nullopt;
    if (is_url(s)) {
        auto sep = s.find("://");
        std::string norm = lower(s.substr(0, sep)) + "://";
        auto rest = s.substr(sep + 3);
        auto end = rest.find_first_of("/?#");
        norm += lower(rest.substr(0, end));
        if (end != std::string_view::npos) norm += std::string(rest.substr(end));
        return Classification{ArtifactKind::url, norm};
    }
    if (is_email_address(s)) {
        auto at = s.find('@');
        return Classification{ArtifactKind::email_address, std::string(s.substr(0, at + 1)) + lower(s.substr(at + 1))};
    }
    if (is_ipv4_address(s)) return Classification{ArtifactKind::ip_address, std::string(s)};
    if (auto key = normalize_registry_key(s)) return Classification{ArtifactKind::registry_key, *key};
    if (is_wallet_address(s)) return Classification{ArtifactKind::wallet, std::string(s)};
    if (is_file_path(s)) return Classification{ArtifactKind::file_path, std::string(s)};
    if (is_base64_blob(s)) return Classification{ArtifactKind::base64_blob, std::string(s)};
    return std::nullopt;
}

namespace {

bool is_persistence_key(std::string_view key) {
    static constexpr std::array<std::string_view, 7> markers{
        "\\currentversion\\run",   "\\currentversion\\policies\\explorer\\run",
        "\\winlogon",              "\\explorer\\shell folders",
        "\\explorer\\user shell folders", "\\image file execution options",
        "\\currentversion\\explorer\\startupapproved",
    };
    auto l = lower(key);
    return std::any_of(markers.begin(), markers.end(), [&](auto m) { return l.find(m) != std::string::npos; });
}

bool is_startup_path(std::string_view path) {
    auto l = lower(path);
    return l.find("\\start menu\\programs\\startup") != std::string::npos ||
           l.find("\\startup\\") != std::string::npos ||
           (l.size() >= 8 && l.compare(l.size() - 8, 8, "\\startup") == 0) ||
           l.find("/.config/autostart") != std::string::npos || l.rfind("/etc/init.d/", 0) == 0 ||
           l.rfind("/etc/cron", 0) == 0;
}

bool is_internal_host(const std::string& host) {
    if (is_ipv4_address(host)) return is_private_ipv4(host);
    return host == "localhost" || host == "::1" ||
           (host.size() > 6 && host.compare(host.size() - 6, 6, ".local") == 0) ||
           (host.size() > 9 && host.compare(host.size() - 9, 9, ".internal") == 0);
}

} // namespace

RiskAssessment assess_risk(ArtifactKind kind, std::string_view value, const RiskContext& context) {
    const bool script = context.tag == "JS" || context.tag == "TEXT";
    switch (kind) {
    case ArtifactKind::registry_key:
        if (is_persistence_key(value)) {
            return {Severity::high_risk, "persistence mechanism: programs registered under this key start automatically at logon"};
        }
        return {Severity::info, "registry location referenced by the sample"};
    case ArtifactKind::file_path:
        if (is_startup_path(value)) {
            return {Severity::high_risk, "persistence mechanism: files placed in a startup location run automatically"};
        }
        return {Severity::info, "file system path referenced by the sample"};
    case ArtifactKind::wallet:
        return {Severity::high_risk, "cryptocurrency wallet address: possible ransom demand payment destination"};
    case ArtifactKind::email_address:
        if (context.wallet_present) {
            return {Severity::high_risk, "contact address next to a wallet: likely ransom negotiation channel"};
        }
        return {Severity::info, "email address: possible contact or exfiltration channel"};
    case ArtifactKind::url: {
        std::string v(value);
        if (is_internal_host(url_host(v))) return {Severity::info, "internal address: local service or test endpoint"};
        if (script) return {Severity::suspicious, "public URL in script content: possible payload download or C2 endpoint"};
        return {Severity::suspicious, "public URL: possible C2 endpoint or payload download location"};
    }
    case ArtifactKind::ip_address:
        if (is_private_ipv4(value)) return {Severity::info, "private or reserved address: internal network reference"};
        return {Severity::suspicious, "public IP address: possible C2 server or exfiltration target"};
    case ArtifactKind::base64_blob:
        return {Severity::info, "encoded data blob: may hide configuration or a payload"};
    }
    return {Severity::info, "unclassified"};
}

std::vector<ExtractedArtifact> scan(ByteView data, std::size_t min_length, std::string_view context_tag) {
    std::vector<ExtractedArtifact> out;
    for (auto& s : extract_strings(data, min_length)) {
        auto c = classify_string(s.value);
        if (!c) continue;
        out.push_back({c->kind, std::move(c->normalized), std::move(s), Severity::info, {}});
    }
    RiskContext ctx{std::string(context_tag), false};
    ctx.wallet_present = std::any_of(out.begin(), out.end(), [](const auto& a) { return a.kind == ArtifactKind::wallet; });
    for (auto& a : out) {
        auto r = assess_risk(a.kind, a.value, ctx);
        a.risk = r.risk;
        a.explanation = std::move(r.explanation);
    }
    return out;
}

} // namespace casefile
