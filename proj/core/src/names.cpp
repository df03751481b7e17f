#include "miniform/names.hpp"

namespace miniform {

SymbolTable::SymbolTable() {
    b_.e = declare("e_", NameClass::Tensor, Symmetry::Antisymmetric);
    entries_[static_cast<size_t>(b_.e)].builtin = true;
    b_.sum = declare("sum_", NameClass::CFunction);
    entries_[static_cast<size_t>(b_.sum)].builtin = true;
    b_.sig = declare("sig_", NameClass::CFunction);
    entries_[static_cast<size_t>(b_.sig)].builtin = true;
    b_.count = declare("count_", NameClass::CFunction);
    entries_[static_cast<size_t>(b_.count)].builtin = true;
}

int SymbolTable::declare(std::string_view name, NameClass cls, Symmetry sym, int tableDim) {
    auto it = byName_.find(std::string(name));
    if (it != byName_.end()) {
        NameInfo& e = entries_[static_cast<size_t>(it->second)];
        if (e.cls != cls)
            throw NameError{"Name " + e.name + " already declared with a different type"};
        if (sym != Symmetry::None)
            e.sym = sym;
        if (tableDim)
            e.tableDim = tableDim;
        return e.id;
    }
    NameInfo e;
    e.name = std::string(name);
    e.cls = cls;
    e.id = static_cast<int>(entries_.size());
    e.sym = sym;
    e.tableDim = tableDim;
    entries_.push_back(e);
    byName_.emplace(e.name, e.id);
    return e.id;
}

const NameInfo* SymbolTable::find(std::string_view name) const {
    auto it = byName_.find(std::string(name));
    if (it == byName_.end())
        return nullptr;
    return &entries_[static_cast<size_t>(it->second)];
}

bool SymbolTable::isFunction(int id) const {
    NameClass c = info(id).cls;
    return c == NameClass::CFunction || c == NameClass::NFunction || c == NameClass::Tensor ||
           c == NameClass::Table;
}

static const std::vector<std::string> kEmpty;

const std::vector<std::string>& SymbolTable::setElements(int id) const {
    auto it = sets_.find(id);
    return it == sets_.end() ? kEmpty : it->second;
}

void SymbolTable::setSetElements(int id, std::vector<std::string> elems) {
    sets_[id] = std::move(elems);
}

} // namespace miniform
