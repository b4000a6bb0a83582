const hre = require("hardhat");
const ethers = hre.ethers;
const AD0 = "0x0000000000000000000000000000000000000000";
async function main() {
    const ENSRegistry =
        await ethers.getContractFactory("ENSRegistry")
    const PublicResolver =
        await ethers.getContractFactory("PublicResolver")
    const ens = await ENSRegistry.deploy()
    await ens.deployed()
    const resolver =
        await PublicResolver.deploy(ens.address, AD0);
    await resolver.deployed()
}
