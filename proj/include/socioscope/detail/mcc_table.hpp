// Generated by tools/gen_mcc_table.py from data/mcc_directory.csv. Do not edit.
#pragma once

#include <array>
#include <string_view>

namespace socioscope::detail {

struct MccRow {
  int mcc;
  std::string_view name;
  std::string_view pcg;
};

inline constexpr std::array<MccRow, 276> kMccTable{{
    {742, "Veterinary Serv.", "Agricultural Services"},
    {763, "Agricultural Cooperative", "Agricultural Services"},
    {780, "Landscaping Serv.", "Agricultural Services"},
    {1520, "General Contr.", "Contracted Services"},
    {1711, "Heating, Plumbing", "Contracted Services"},
    {1731, "Electrical Contr.", "Contracted Services"},
    {1740, "Masonry & Stonework", "Contracted Services"},
    {1750, "Carpentry Contr.", "Contracted Services"},
    {1761, "Sheet Metal", "Contracted Services"},
    {1771, "Concrete Work Contr.", "Contracted Services"},
    {1799, "Special Trade Contr.", "Contracted Services"},
    {2741, "Publishing and Printing", "Business Services"},
    {2791, "Typesetting Serv.", "Business Services"},
    {2842, "Specialty Cleaning", "Business Services"},
    {4011, "Railroads", "Transportation"},
    {4111, "Ferries", "Transportation"},
    {4112, "Passenger Railways", "Transportation"},
    {4119, "Ambulance Serv.", "Transportation"},
    {4121, "Taxicabs", "Transportation"},
    {4131, "Bus Lines", "Transportation"},
    {4214, "Motor Freight Carriers", "Postal and Courier"},
    {4215, "Courier Serv.", "Postal and Courier"},
    {4225, "Public Storage", "Transportation"},
    {4411, "Cruise Lines", "Transportation"},
    {4457, "Boat Rentals and Leases", "Transportation"},
    {4468, "Marinas Serv. and Supp.", "Transportation"},
    {4511, "Airlines", "Airlines"},
    {4582, "Airports, Flying Fields", "Airlines"},
    {4722, "Travel Agencies", "Airlines"},
    {4784, "Tolls/Bridge Fees", "Transportation"},
    {4789, "Transportation Serv.", "Transportation"},
    {4812, "Phone St.", "Telecom"},
    {4814, "Telecom.", "Telecom"},
    {4816, "Comp. Net. Serv.", "Telecom"},
    {4821, "Telegraph Serv.", "Telecom"},
    {4829, "Money Transfer", "Service Providers"},
    {4899, "Techno St.", "Telecom"},
    {4900, "Utilities", "Utilities"},
    {5013, "Motor Vehicle Supp.", "Automobiles"},
    {5021, "Commercial Furniture", "Wholesale Trade"},
    {5039, "Constr. Materials", "Wholesale Trade"},
    {5044, "Photographic Equip.", "Wholesale Trade"},
    {5045, "Computer St.", "Wholesale Trade"},
    {5046, "Commercial Equipment", "Wholesale Trade"},
    {5047, "Medical Equipment", "Wholesale Trade"},
    {5051, "Metal Service Centers", "Wholesale Trade"},
    {5065, "Electrical St.", "Wholesale Trade"},
    {5072, "Hardware Supp.", "Wholesale Trade"},
    {5074, "Plumbing, Heating Equip.", "Wholesale Trade"},
    {5085, "Industrial Supplies", "Wholesale Trade"},
    {5094, "Precious Objects/Stones", "High Risk Personal Retail"},
    {5099, "Durable Goods", "Wholesale Trade"},
    {5111, "Printing, Office Supp.", "Wholesale Trade"},
    {5122, "Drug Proprietaries", "Wholesale Trade"},
    {5131, "Notions Goods", "Wholesale Trade"},
    {5137, "Uniforms Clothing", "Clothing Stores"},
    {5139, "Commercial Footwear", "Clothing Stores"},
    {5169, "Chemicals Products", "Wholesale Trade"},
    {5172, "Petroleum Products", "Gas Stations"},
    {5192, "Newspapers", "Wholesale Trade"},
    {5193, "Nursery & Flowers Supp.", "Wholesale Trade"},
    {5198, "Paints", "Wholesale Trade"},
    {5199, "Nondurable Goods", "Wholesale Trade"},
    {5200, "Home Supply St.", "Retail Stores"},
    {5211, "Materials St.", "Retail Stores"},
    {5231, "Glass & Paint St.", "Retail Stores"},
    {5251, "Hardware St.", "Retail Stores"},
    {5261, "Nurseries & Garden St.", "Retail Stores"},
    {5271, "Mobile Home Dealers", "Retail Stores"},
    {5300, "Wholesale", "Retail Stores"},
    {5309, "Duty Free St.", "Retail Stores"},
    {5310, "Discount Stores", "Retail Stores"},
    {5311, "Dep. St.", "Retail Stores"},
    {5331, "Variety Stores", "Retail Stores"},
    {5399, "General Merch.", "Retail Stores"},
    {5411, "Supermarkets", "Retail Stores"},
    {5422, "Meat Prov.", "Retail Stores"},
    {5441, "Candy St.", "Retail Stores"},
    {5451, "Dairy Products St.", "Retail Stores"},
    {5462, "Bakeries", "Retail Stores"},
    {5499, "Food St.", "Retail Stores"},
    {5511, "Cars Sales", "Automobiles"},
    {5521, "Car Repairs Sales", "Automobiles"},
    {5531, "Auto and Home Supp. St.", "Automobiles"},
    {5532, "Auto St.", "Automobiles"},
    {5533, "Auto Access.", "Automobiles"},
    {5541, "Gas Stations", "Gas Stations"},
    {5542, "Automated Fuel Dispensers", "Gas Stations"},
    {5551, "Boat Dealers", "Automobiles"},
    {5561, "Motorcycle Sh.", "Automobiles"},
    {5571, "Motorcycle Sh.", "Automobiles"},
    {5592, "Motor Homes Dealers", "Automobiles"},
    {5598, "Snowmobile Dealers", "Automobiles"},
    {5599, "Auto Dealers", "Automobiles"},
    {5611, "Men Cloth. St.", "Clothing Stores"},
    {5621, "Wom Cloth. St.", "Clothing Stores"},
    {5631, "Women's Accessory Sh.", "Clothing Stores"},
    {5641, "Children's Wear St.", "Clothing Stores"},
    {5651, "Family Cloth. St.", "Clothing Stores"},
    {5655, "Sports & Riding St.", "Clothing Stores"},
    {5661, "Shoe St.", "Clothing Stores"},
    {5681, "Furriers Sh.", "Clothing Stores"},
    {5691, "Cloth. Stores", "Clothing Stores"},
    {5697, "Tailors", "Clothing Stores"},
    {5698, "Wig and Toupee St.", "Clothing Stores"},
    {5699, "Apparel Accessory Sh.", "Clothing Stores"},
    {5712, "Furniture", "Miscellaneous Stores"},
    {5713, "Floor Covering St.", "Miscellaneous Stores"},
    {5714, "Window Covering St.", "Miscellaneous Stores"},
    {5718, "Fire Accessories St.", "Miscellaneous Stores"},
    {5719, "Home Furnishing St.", "Miscellaneous Stores"},
    {5722, "House St.", "Miscellaneous Stores"},
    {5732, "Elec. St.", "Miscellaneous Stores"},
    {5733, "Music Intsruments St.", "Miscellaneous Stores"},
    {5734, "Comp.Soft. St.", "Miscellaneous Stores"},
    {5735, "Record Stores", "Miscellaneous Stores"},
    {5811, "Caterers", "Restaurants"},
    {5812, "Restaurants", "Restaurants"},
    {5813, "Drinking Pl.", "Restaurants"},
    {5814, "Fast Foods", "Restaurants"},
    {5912, "Drug St.", "Retail Stores"},
    {5921, "Alcohol St.", "High Risk Personal Retail"},
    {5931, "Secondhand Stores", "Miscellaneous Stores"},
    {5932, "Antique Sh.", "Miscellaneous Stores"},
    {5933, "Pawn Shops", "High Risk Personal Retail"},
    {5935, "Wrecking Yards", "Miscellaneous Stores"},
    {5937, "Antique Reproductions", "Miscellaneous Stores"},
    {5940, "Bicycle Sh.", "Miscellaneous Stores"},
    {5941, "Sporting St.", "Miscellaneous Stores"},
    {5942, "Book St.", "Miscellaneous Stores"},
    {5943, "Stationery St.", "Miscellaneous Stores"},
    {5944, "Jewelry St.", "High Risk Personal Retail"},
    {5945, "Toy,-Game Sh.", "Miscellaneous Stores"},
    {5946, "Camera and Photo St.", "Miscellaneous Stores"},
    {5947, "Gift Sh.", "Miscellaneous Stores"},
    {5948, "Luggage & Leather St.", "Miscellaneous Stores"},
    {5949, "Fabric St.", "Miscellaneous Stores"},
    {5950, "Glassware, Crystal St.", "Miscellaneous Stores"},
    {5960, "Dir Mark - Insurance", "Mail Phone Order"},
    {5962, "Direct Marketing - Travel", "Mail Phone Order"},
    {5963, "Door-To-Door Sales", "Mail Phone Order"},
    {5964, "Dir. Mark. Catalog", "Mail Phone Order"},
    {5965, "Dir. Mark. Retail Merchant", "Mail Phone Order"},
    {5966, "Dir Mark - TV", "Mail Phone Order"},
    {5967, "Dir. Mark.", "Mail Phone Order"},
    {5968, "Dir. Mark. Subscription", "Mail Phone Order"},
    {5969, "Dir. Mark. Other", "Mail Phone Order"},
    {5970, "Artist's Supp.", "Miscellaneous Stores"},
    {5971, "Art Dealers & Galleries", "Miscellaneous Stores"},
    {5972, "Stamp and Coin St.", "Miscellaneous Stores"},
    {5973, "Religious St.", "Miscellaneous Stores"},
    {5975, "Hearing Aids", "Miscellaneous Stores"},
    {5976, "Orthopedic Goods", "Miscellaneous Stores"},
    {5977, "Cosmetic St.", "High Risk Personal Retail"},
    {5978, "Typewriter St.", "Miscellaneous Stores"},
    {5983, "Fuel Dealers (Non Auto)", "Gas Stations"},
    {5992, "Florists", "Miscellaneous Stores"},
    {5993, "Cigar St.", "High Risk Personal Retail"},
    {5994, "Newsstands", "Miscellaneous Stores"},
    {5995, "Pet Sh.", "Miscellaneous Stores"},
    {5996, "Swimming Pools Sales", "Miscellaneous Stores"},
    {5997, "Electric Razor St.", "Miscellaneous Stores"},
    {5998, "Tent and Awning Sh.", "Miscellaneous Stores"},
    {5999, "Specialty Retail", "Miscellaneous Stores"},
    {6010, "Manual Cash Disbursements", "Service Providers"},
    {6011, "Automated Cash Disbursements", "Service Providers"},
    {6012, "Financial Institutions Merchandise", "Service Providers"},
    {6051, "Quasi Cash", "Service Providers"},
    {6211, "Security Brokers", "Financial Services"},
    {6300, "Insurance", "Financial Services"},
    {7011, "Hotels", "Hotels and Motels"},
    {7012, "Timeshares", "Hotels and Motels"},
    {7032, "Sporting Camps", "Hotels and Motels"},
    {7033, "Trailer Parks, Camps", "Hotels and Motels"},
    {7210, "Laundry, Cleaning Serv.", "Personal Services"},
    {7211, "Laundries", "Personal Services"},
    {7216, "Dry Cleaners", "Personal Services"},
    {7217, "Upholstery Cleaning", "Personal Services"},
    {7221, "Photographic Studios", "Personal Services"},
    {7230, "Beauty Sh.", "High Risk Personal Retail"},
    {7251, "Shoe Repair/Hat Cleaning", "Personal Services"},
    {7261, "Funeral Serv.", "Personal Services"},
    {7273, "Dating/Escort Serv.", "High Risk Personal Retail"},
    {7276, "Tax Preparation Serv.", "Professional Services"},
    {7277, "Counseling Services", "Professional Services"},
    {7278, "Buying/Shopping Serv.", "Personal Services"},
    {7296, "Clothing Rental", "Personal Services"},
    {7297, "Massage Parlors", "High Risk Personal Retail"},
    {7298, "Health and Beauty Spas", "High Risk Personal Retail"},
    {7299, "General Serv.", "Personal Services"},
    {7311, "Advertising Serv.", "Business Services"},
    {7321, "Credit Reporting Agencies", "Business Services"},
    {7333, "Graphic Design", "Business Services"},
    {7338, "Quick Copy", "Business Services"},
    {7339, "Secretarial Support Serv.", "Business Services"},
    {7342, "Exterminating Services", "Business Services"},
    {7349, "Cleaning and Maintenance", "Business Services"},
    {7361, "Employment Agencies", "Business Services"},
    {7372, "Computer Programming", "Business Services"},
    {7375, "Information Retrieval Serv.", "Business Services"},
    {7379, "Computer Repair", "Business Services"},
    {7392, "Consulting, Public Relations", "Business Services"},
    {7393, "Detective Agencies", "Business Services"},
    {7394, "Equipment Rental", "Rental Services"},
    {7395, "Photo Developing", "Business Services"},
    {7399, "Business Serv.", "Business Services"},
    {7512, "Car Rental Agencies", "Rental Services"},
    {7513, "Truck/Trailer Rentals", "Rental Services"},
    {7519, "Mobile Home Rentals &", "Rental Services"},
    {7523, "Parking Lots, Garages", "Automobiles"},
    {7531, "Auto Body Repair Sh.", "Automobiles"},
    {7534, "Tire Retreading & Repair", "Automobiles"},
    {7535, "Auto Paint Sh.", "Automobiles"},
    {7538, "Auto Service Shops", "Automobiles"},
    {7542, "Car Washes", "Automobiles"},
    {7549, "Towing Serv.", "Automobiles"},
    {7622, "Electronics Repair Sh.", "Repair Services"},
    {7623, "Refrigeration Repair", "Repair Services"},
    {7629, "Small Appliance Repair", "Repair Services"},
    {7631, "Watch/Jewelry Repair", "Repair Services"},
    {7641, "Furniture Repair", "Repair Services"},
    {7692, "Welding Repair", "Repair Services"},
    {7699, "Repair Sh.", "Repair Services"},
    {7829, "Picture/Video Production", "Entertainment"},
    {7832, "Cinema", "Entertainment"},
    {7841, "Video Tape Rental St.", "Entertainment"},
    {7911, "Dance Hall & Studios", "Entertainment"},
    {7922, "Theater Ticket", "Entertainment"},
    {7929, "Bands, Orchestras", "Entertainment"},
    {7932, "Billiard/Pool", "Entertainment"},
    {7933, "Bowling", "Entertainment"},
    {7941, "Sports Clubs", "Entertainment"},
    {7991, "Tourist Attractions", "Entertainment"},
    {7992, "Golf Courses", "Entertainment"},
    {7993, "Video Game Supp.", "Entertainment"},
    {7994, "Video Game Arcades", "Entertainment"},
    {7995, "Gambling", "Entertainment"},
    {7996, "Amusement Parks", "Entertainment"},
    {7997, "Country Clubs", "Entertainment"},
    {7998, "Aquariums", "Entertainment"},
    {7999, "Recreation Serv.", "Entertainment"},
    {8011, "Doctors", "Professional Services"},
    {8021, "Dentists, Orthodontists", "Professional Services"},
    {8031, "Osteopaths", "Professional Services"},
    {8041, "Chiropractors", "Professional Services"},
    {8042, "Optometrists", "Professional Services"},
    {8043, "Opticians", "Professional Services"},
    {8049, "Chiropodists, Podiatrists", "Professional Services"},
    {8050, "Nursing/Personal Care", "Professional Services"},
    {8062, "Hospitals", "Professional Services"},
    {8071, "Medical Labs", "Professional Services"},
    {8099, "Medical Services", "Professional Services"},
    {8111, "Legal Services, Attorneys", "Professional Services"},
    {8211, "Elem. Schools", "Education"},
    {8220, "Colleges Univ.", "Education"},
    {8241, "Correspondence Schools", "Education"},
    {8244, "Business Schools", "Education"},
    {8249, "Training Schools", "Education"},
    {8299, "Educational Serv.", "Education"},
    {8351, "Child Care Serv.", "Education"},
    {8398, "Donation", "Membership Organizations"},
    {8641, "Associations", "Membership Organizations"},
    {8651, "Political Org.", "Membership Organizations"},
    {8661, "Religious Orga.", "Membership Organizations"},
    {8675, "Automobile Associations", "Membership Organizations"},
    {8699, "Membership Org.", "Membership Organizations"},
    {8734, "Testing Lab.", "Professional Services"},
    {8911, "Architectural Serv.", "Professional Services"},
    {8931, "Accounting Serv.", "Professional Services"},
    {8999, "Professional Serv.", "Professional Services"},
    {9211, "Courts of Law", "Government Services"},
    {9222, "Government Fees", "Government Services"},
    {9223, "Bail and Bond Payments", "Government Services"},
    {9311, "Tax Payments", "Government Services"},
    {9399, "Government Serv.", "Government Services"},
    {9402, "Postal Serv.", "Postal and Courier"},
}};

}  // namespace socioscope::detail
