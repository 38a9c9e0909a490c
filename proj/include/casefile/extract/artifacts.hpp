// casefile - offline artifact analysis workbench
// String artifact classification (URL, IP, registry key, wallet, ...) and
// the risk table that explains each finding.

#pragma once

#include <casefile/engine/identification.hpp>
#include <casefile/extract/strings.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casefile {

/// Declaration order is the classification priority.
enum class ArtifactKind { url, email_address, ip_address, registry_key, wallet, file_path, base64_blob };

const char* to_string(ArtifactKind kind) noexcept;

struct Classification {
    ArtifactKind kind;
    std::string normalized;
};

/// First matching rule wins, in the order Url, EmailAddress, IpAddress,
/// RegistryKey, Wallet, FilePath, Base64Blob. The whole value (trimmed of
/// surrounding whitespace) must match.
std::optional<Classification> classify_string(std::string_view value);

// Individual acceptance rules, exposed for tests and for other modules.
bool is_url(std::string_view s);
bool is_email_address(std::string_view s);
bool is_ipv4_address(std::string_view s);
bool is_registry_key(std::string_view s);
bool is_wallet_address(std::string_view s);
bool is_base58check_address(std::string_view s);
bool is_bech32_address(std::string_view s);
bool is_file_path(std::string_view s);
bool is_base64_blob(std::string_view s);
bool is_private_ipv4(std::string_view s);

struct RiskContext {
    std::string tag;            ///< identifier tag of the containing artifact
    bool wallet_present = false; ///< another artifact in the same buffer is a wallet
};

struct RiskAssessment {
    Severity risk = Severity::info;
    std::string explanation;
};

RiskAssessment assess_risk(ArtifactKind kind, std::string_view value, const RiskContext& context);

struct ExtractedArtifact {
    ArtifactKind kind;
    std::string value; ///< normalized form
    LocatedString location;
    Severity risk = Severity::info;
    std::string explanation;
};

/// extract_strings -> classify_string -> assess_risk; unclassified strings are dropped.
std::vector<ExtractedArtifact> scan(ByteView data, std::size_t min_length = default_min_string_length,
                                    std::string_view context_tag = {});

} // namespace casefile
