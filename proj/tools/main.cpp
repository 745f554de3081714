#include "gbase_cli.hpp"

int main(int argc, char** argv)
{
    return gbase::cli::run(argc, argv, std::cout, std::cerr);
}
