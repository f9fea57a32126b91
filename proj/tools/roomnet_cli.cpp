#include <cstdio>

int main() {
    std::puts("roomnet cli: subcommands pending");
    return 1;
}
