#include <cstdio>

int main() {
    std::puts("phigamma: CLI not wired up yet");
    return 1;
}
