#ifndef UIC_ERROR_HPP
#define UIC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace uic {

// Malformed bytes: PGM headers, .uic containers, Huffman tables.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// File system failures (open, read, write, rename).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uic

#endif // UIC_ERROR_HPP
