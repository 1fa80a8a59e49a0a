// tests/acceptance.cpp
int main() { return 0; }
