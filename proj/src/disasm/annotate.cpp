// casefile - offline artifact analysis workbench

#include <casefile/disasm/x86.hpp>

#include <casefile/pe/pe.hpp>

#include <set>

namespace casefile {

void SignatureTable::add(ApiSignature signature) {
    auto name = signature.name;
    table_[name] = std::move(signature);
}

const ApiSignature* SignatureTable::find(std::string_view api) const {
    auto it = table_.find(api);
    return it == table_.end() ? nullptr : &it->second;
}

SignatureTable SignatureTable::builtin() {
    SignatureTable t;
    const std::vector<std::string> create_file{"lpFileName", "dwDesiredAccess", "dwShareMode", "lpSecurityAttributes",
                                               "dwCreationDisposition", "dwFlagsAndAttributes", "hTemplateFile"};
    const std::vector<std::string> reg_create{"hKey", "lpSubKey", "Reserved", "lpClass", "dwOptions",
                                              "samDesired", "lpSecurityAttributes", "phkResult", "lpdwDisposition"};
    const std::vector<std::string> reg_open{"hKey", "lpSubKey", "ulOptions", "samDesired", "phkResult"};
    const std::vector<std::string> reg_set{"hKey", "lpValueName", "Reserved", "dwType", "lpData", "cbData"};
    const std::vector<std::string> message_box{"hWnd", "lpText", "lpCaption", "uType"};
    const std::vector<std::string> load_library{"lpLibFileName"};
    for (const char* suffix : {"A", "W"}) {
        const std::string s = suffix;
        t.add({"CreateFile" + s, create_file});
        t.add({"RegCreateKeyEx" + s, reg_create});
        t.add({"RegOpenKeyEx" + s, reg_open});
        t.add({"RegSetValueEx" + s, reg_set});
        t.add({"MessageBox" + s, message_box});
        t.add({"LoadLibrary" + s, load_library});
    }
    t.add({"WriteFile", {"hFile", "lpBuffer", "nNumberOfBytesToWrite", "lpNumberOfBytesWritten", "lpOverlapped"}});
    t.add({"ReadFile", {"hFile", "lpBuffer", "nNumberOfBytesToRead", "lpNumberOfBytesRead", "lpOverlapped"}});
    t.add({"CloseHandle", {"hObject"}});
    t.add({"RegCloseKey", {"hKey"}});
    t.add({"CryptAcquireContextW", {"phProv", "szContainer", "szProvider", "dwProvType", "dwFlags"}});
    t.add({"CryptGenKey", {"hProv", "Algid", "dwFlags", "phKey"}});
    t.add({"CryptEncrypt", {"hKey", "hHash", "Final", "dwFlags", "pbData", "pdwDataLen", "dwBufLen"}});
    t.add({"CreateProcessW", {"lpApplicationName", "lpCommandLine", "lpProcessAttributes", "lpThreadAttributes",
                              "bInheritHandles", "dwCreationFlags", "lpEnvironment", "lpCurrentDirectory",
                              "lpStartupInfo", "lpProcessInformation"}});
    t.add({"WinExec", {"lpCmdLine", "uCmdShow"}});
    t.add({"ShellExecuteW", {"hwnd", "lpOperation", "lpFile", "lpParameters", "lpDirectory", "nShowCmd"}});
    t.add({"VirtualAlloc", {"lpAddress", "dwSize", "flAllocationType", "flProtect"}});
    t.add({"VirtualProtect", {"lpAddress", "dwSize", "flNewProtect", "lpflOldProtect"}});
    t.add({"GetProcAddress", {"hModule", "lpProcName"}});
    t.add({"CopyFileW", {"lpExistingFileName", "lpNewFileName", "bFailIfExists"}});
    t.add({"DeleteFileW", {"lpFileName"}});
    t.add({"FindFirstFileW", {"lpFileName", "lpFindFileData"}});
    t.add({"InternetOpenW", {"lpszAgent", "dwAccessType", "lpszProxy", "lpszProxyBypass", "dwFlags"}});
    t.add({"InternetOpenUrlW", {"hInternet", "lpszUrl", "lpszHeaders", "dwHeadersLength", "dwFlags", "dwContext"}});
    t.add({"URLDownloadToFileW", {"pCaller", "szURL", "szFileName", "dwReserved", "lpfnCB"}});
    t.add({"ExitProcess", {"uExitCode"}});
    t.add({"Sleep", {"dwMilliseconds"}});
    t.add({"GetStdHandle", {"nStdHandle"}});
    return t;
}

std::vector<Instruction> annotate_api_calls(std::vector<Instruction> insns, const PeFile& pe,
                                            const SignatureTable& signatures) {
    std::set<std::uint64_t> labels;
    for (const auto& i : insns) {
        if (i.branch_target) labels.insert(*i.branch_target);
    }
    for (std::size_t k = 0; k < insns.size(); ++k) {
        auto& call = insns[k];
        if (call.cls != InsnClass::call) continue;
        const auto target = call.memory_target();
        if (!target || *target < pe.image_base) continue;
        const auto rva = *target - pe.image_base;
        if (rva > 0xFFFFFFFFu) continue;
        const auto slot = pe.import_at(static_cast<std::uint32_t>(rva));
        if (!slot) continue;
        ApiAnnotation a;
        a.library = slot->first->name;
        a.api = slot->second->display();
        const auto* sig = signatures.find(a.api);
        a.known_signature = sig != nullptr;
        if (sig && pe.bitness() == 32) {
            for (std::size_t j = k; j-- > 0 && a.bindings.size() < sig->parameters.size();) {
                const auto& prev = insns[j];
                if (prev.cls == InsnClass::call || prev.cls == InsnClass::jump || prev.cls == InsnClass::cond_jump ||
                    prev.cls == InsnClass::ret || prev.cls == InsnClass::data) {
                    break;
                }
                if (prev.cls == InsnClass::push) {
                    ParameterBinding b;
                    b.name = sig->parameters[a.bindings.size()];
                    b.source_offset = prev.offset;
                    if (prev.immediate) b.value = static_cast<std::uint32_t>(*prev.immediate);
                    b.source_text = prev.operands.empty() ? std::string() : prev.operands.front();
                    a.bindings.push_back(std::move(b));
                } else if (prev.writes_stack_pointer || prev.cls == InsnClass::pop) {
                    break;
                }
                if (labels.count(prev.address)) break; // control may enter here from elsewhere
            }
            a.partial = a.bindings.size() < sig->parameters.size();
        }
        call.annotation = std::move(a);
    }
    return insns;
}

DisassemblyModel disassemble_pe(ByteView data, const PeFile& pe, const SignatureTable& signatures) {
    DisassemblyModel m;
    m.bitness = pe.bitness();
    for (const auto& s : pe.sections) {
        if (!s.executable() || s.raw_size == 0) continue;
        const auto length = std::min<std::uint64_t>(s.raw_size, s.virtual_size ? s.virtual_size : s.raw_size);
        DisassemblyModel::Region r;
        r.section = s.name;
        r.offset = s.raw_offset;
        r.address = pe.image_base + s.virtual_address;
        r.instructions = annotate_api_calls(linear_sweep(data, s.raw_offset, length, m.bitness, r.address), pe, signatures);
        m.regions.push_back(std::move(r));
    }
    return m;
}

} // namespace casefile
