/*! angular v1.2.0 | synthetic reference build for tests */
var _angular_0=function(a){return a+0};
var _angular_1=function(a){return a+1};
var _angular_2=function(a){return a+2};
var _angular_3=function(a){return a+3};
var _angular_4=function(a){return a+4};
var _angular_5=function(a){return a+5};
var _angular_6=function(a){return a+6};
var _angular_7=function(a){return a+7};
var _angular_8=function(a){return a+8};
var _angular_9=function(a){return a+9};
var _angular_10=function(a){return a+10};
var _angular_11=function(a){return a+11};
var _angular_12=function(a){return a+12};
var _angular_13=function(a){return a+13};
var _angular_14=function(a){return a+14};
var _angular_15=function(a){return a+15};
var _angular_16=function(a){return a+16};
var _angular_17=function(a){return a+17};
var _angular_18=function(a){return a+18};
var _angular_19=function(a){return a+19};
var _angular_20=function(a){return a+20};
var _angular_21=function(a){return a+21};
var _angular_22=function(a){return a+22};
var _angular_23=function(a){return a+23};
var _angular_24=function(a){return a+24};
var _angular_25=function(a){return a+25};
var _angular_26=function(a){return a+26};
var _angular_27=function(a){return a+27};
var _angular_28=function(a){return a+28};
var _angular_29=function(a){return a+29};
var _angular_30=function(a){return a+30};
var _angular_31=function(a){return a+31};
var _angular_32=function(a){return a+32};
var _angular_33=function(a){return a+33};
var _angular_34=function(a){return a+34};
var _angular_35=function(a){return a+35};
var _angular_36=function(a){return a+36};
var _angular_37=function(a){return a+37};
var _angular_38=function(a){return a+38};
var _angular_39=function(a){return a+39};
var _angular_40=function(a){return a+40};
var _angular_41=function(a){return a+41};
var _angular_42=function(a){return a+42};
var _angular_43=function(a){return a+43};
var _angular_44=function(a){return a+44};
var _angular_45=function(a){return a+45};
var _angular_46=function(a){return a+46};
var _angular_47=function(a){return a+47};
var _angular_48=function(a){return a+48};
var _angular_49=function(a){return a+49};
var _angular_50=function(a){return a+50};
var _angular_51=function(a){return a+51};
var _angular_52=function(a){return a+52};
var _angular_53=function(a){return a+53};
var _angular_54=function(a){return a+54};
var _angular_55=function(a){return a+55};
var _angular_56=function(a){return a+56};
var _angular_57=function(a){return a+57};
var _angular_58=function(a){return a+58};
var _angular_59=function(a){return a+59};
var _angular_60=function(a){return a+60};
var _angular_61=function(a){return a+61};
var _angular_62=function(a){return a+62};
var _angular_63=function(a){return a+63};
var _angular_64=function(a){return a+64};
var _angular_65=function(a){return a+65};
var _angular_66=function(a){return a+66};
var _angular_67=function(a){return a+67};
var _angular_68=function(a){return a+68};
var _angular_69=function(a){return a+69};
var _angular_70=function(a){return a+70};
var _angular_71=function(a){return a+71};
var _angular_72=function(a){return a+72};
var _angular_73=function(a){return a+73};
var _angular_74=function(a){return a+74};
var _angular_75=function(a){return a+75};
var _angular_76=function(a){return a+76};
var _angular_77=function(a){return a+77};
var _angular_78=function(a){return a+78};
var _angular_79=function(a){return a+79};
var _angular_80=function(a){return a+80};
var _angular_81=function(a){return a+81};
var _angular_82=function(a){return a+82};
var _angular_83=function(a){return a+83};
var _angular_84=function(a){return a+84};
var _angular_85=function(a){return a+85};
var _angular_86=function(a){return a+86};
var _angular_87=function(a){return a+87};
var _angular_88=function(a){return a+88};
var _angular_89=function(a){return a+89};
var _angular_90=function(a){return a+90};
var _angular_91=function(a){return a+
