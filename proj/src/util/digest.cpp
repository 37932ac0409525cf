// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/util/digest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gigcomp {

std::string digest_hex(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file for digest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return digest_hex(buf.str());
}

}  // namespace gigcomp
