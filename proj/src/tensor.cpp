#include "polyjet/tensor.hpp"

namespace polyjet {

std::string index_label(std::span<const std::string> letters, std::span<const std::size_t> idx) {
    std::string out = "[";
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) out += ",";
        out += k < letters.size() ? letters[k] : "k" + std::to_string(k);
        out += "=" + std::to_string(idx[k] + 1);
    }
    return out + "]";
}

}  // namespace polyjet
