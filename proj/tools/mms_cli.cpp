#include <iostream>
int main(){std::cout<<"mms\n";return 0;}
