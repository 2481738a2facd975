#include <algorithm>
#include <random>

#include "doctest.h"
#include "peo/action_map.hpp"
#include "peo/error.hpp"
#include "synthetic.hpp"

using namespace peo;

namespace {

ActionMapError::Kind map_error(std::string_view text) {
  try {
    parse_action_map(text, builtin_vocabulary());
  } catch (const ActionMapError& e) {
    return e.kind();
  }
  FAIL("no ActionMapError raised");
  return ActionMapError::Kind::Malformed;
}

}  // namespace

TEST_SUITE("action_map") {
  TEST_CASE("normalization") {
    CHECK(normalize_api_name("KERNEL32.DLL", "CreateFileA") == "createfile");
    CHECK(normalize_api_name("wininet.dll", "HttpSendRequest") == "httpsendrequest");
    CHECK(normalize_api_name("advapi32.dll", "CryptGenKeyEx") == "cryptgenkey");
    CHECK(normalize_api_name("advapi32.dll", "RegOpenKeyExW") == "regopenkey");
    CHECK(strip_api_suffix("GetDC") == "GetDC");
    CHECK(strip_api_suffix("WSA") == "WSA");
    CHECK(strip_api_suffix("Sleep") == "Sleep");
    CHECK(strip_api_suffix("CreateFileW") == "CreateFile");
    CHECK(dll_base_name("KERNEL32.DLL") == "kernel32");
    CHECK(dll_base_name("ws2_32") == "ws2_32");
  }

  TEST_CASE("load examples") {
    const Vocabulary& v = builtin_vocabulary();
    auto m = parse_action_map("createfile\tcreate-file\n", v);
    CHECK(m.size() == 1);
    CHECK(m.lookup("kernel32.dll", "CreateFileA") == std::optional<std::string_view>("create-file"));
    CHECK(parse_action_map("", v).empty());
    CHECK(parse_action_map("# only a comment\n\n", v).empty());
    CHECK(map_error("httpsendrequest\tsend-http-get-request\n") == ActionMapError::Kind::UnknownActionId);
    CHECK(map_error("createfile\tcreate-file\ncreatefile\tcreate-file\n") == ActionMapError::Kind::DuplicateKey);
    CHECK(map_error("createfile\n") == ActionMapError::Kind::Malformed);
    CHECK(map_error("CreateFile\tcreate-file\n") == ActionMapError::Kind::Malformed);
  }

  TEST_CASE("error carries line number and key") {
    try {
      parse_action_map("# header\ncreatefile\tcreate-file\nfoo\tno-such-action\n", builtin_vocabulary());
      FAIL("expected error");
    } catch (const ActionMapError& e) {
      CHECK(e.line() == 3);
      CHECK(e.key() == "foo");
    }
  }

  TEST_CASE("dll-qualified and exact entries") {
    const Vocabulary& v = builtin_vocabulary();
    auto m = parse_action_map("ws2_32!send\tsend-data-on-socket\nsleep\tdelay-execution\nwsa\tcreate-socket\texact\n", v);
    CHECK(m.lookup("WS2_32.dll", "send") == std::optional<std::string_view>("send-data-on-socket"));
    CHECK_FALSE(m.lookup("user32.dll", "send").has_value());
    CHECK(m.lookup("kernel32.dll", "SleepEx") == std::optional<std::string_view>("delay-execution"));
    CHECK(m.lookup("x.dll", "WSA") == std::optional<std::string_view>("create-socket"));
  }

  TEST_CASE("builtin map") {
    const ApiActionMap& m = builtin_action_map();
    CHECK(m.size() >= 200);
    for (const auto& id : m.action_ids()) CHECK(builtin_vocabulary().find_action(id) != nullptr);
    std::set<std::string> categories;
    for (const auto& id : m.action_ids()) categories.insert(builtin_vocabulary().find_action(id)->category);
    CHECK(categories.size() == 17);
    for (const char* id : {"encrypt", "decrypt", "generate-key", "send-http-request"}) CHECK(m.action_ids().count(id) == 1);
  }

  TEST_CASE("map_imports examples") {
    const ApiActionMap& m = builtin_action_map();
    MappingStats stats;
    CHECK(map_imports({{"kernel32.dll", {"CreateFileA", "CreateFileW"}}}, m, &stats) == std::set<std::string>{"create-file"});
    CHECK(stats.mapped_functions == 2);
    CHECK(map_imports({{"wininet.dll", {"HttpSendRequestA"}}}, m) == std::set<std::string>{"send-http-request"});
    CHECK(map_imports({}, m).empty());
    MappingStats unmapped;
    CHECK(map_imports({{"kernel32.dll", {"DeleteCriticalSection", "TlsSetValue", "Sleep"}}}, m, &unmapped) ==
          std::set<std::string>{"delay-execution"});
    CHECK(unmapped.unmapped_functions == 2);
    CHECK(unmapped.mapped_functions == 1);
  }

  TEST_CASE("map_imports properties") {
    const ApiActionMap& m = builtin_action_map();
    std::vector<std::string> names;
    for (const auto& [key, entry] : m.entries()) {
      auto bang = key.find('!');
      names.push_back(bang == std::string::npos ? key : key.substr(bang + 1));
    }
    names.insert(names.end(), {"DeleteCriticalSection", "GetTickCount", "Foo", "WSA"});
    const char* dlls[] = {"kernel32.dll", "ADVAPI32.dll", "ws2_32.dll", "wininet.dll"};
    std::mt19937_64 rng(11);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const std::size_t bound = m.action_ids().size();
    for (int trial = 0; trial < 500; ++trial) {
      ImportTable imports;
      for (int d = 0, nd = static_cast<int>(pick(4)); d < nd; ++d) {
        auto& fs = imports[dlls[pick(4)]];
        for (int f = 0, nf = static_cast<int>(pick(6)); f < nf; ++f) {
          std::string n = names[pick(names.size())];
          if (pick(2)) n[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(n[0])));
          if (pick(3) == 0) n += "A";
          fs.push_back(n);
        }
      }
      auto base = map_imports(imports, m);
      CHECK(base.size() <= bound);

      ImportTable shuffled = imports;
      for (auto& [dll, fs] : shuffled) {
        std::shuffle(fs.begin(), fs.end(), rng);
        if (!fs.empty()) fs.push_back(fs.front());
      }
      CHECK(map_imports(shuffled, m) == base);

      ImportTable grown = imports;
      grown[dlls[pick(4)]].push_back(names[pick(names.size())]);
      auto more = map_imports(grown, m);
      CHECK(std::includes(more.begin(), more.end(), base.begin(), base.end()));
    }
  }
}
