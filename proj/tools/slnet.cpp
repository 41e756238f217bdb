#include <iostream>
int main() { std::cout << "slnet\n"; return 0; }
