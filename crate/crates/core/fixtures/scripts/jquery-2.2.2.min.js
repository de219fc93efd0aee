/*! jquery v2.2.2 | synthetic reference build for tests */
var _jquery_0=function(a){return a+0};
var _jquery_1=function(a){return a+1};
var _jquery_2=function(a){return a+2};
var _jquery_3=function(a){return a+3};
var _jquery_4=function(a){return a+4};
var _jquery_5=function(a){return a+5};
var _jquery_6=function(a){return a+6};
var _jquery_7=function(a){return a+7};
var _jquery_8=function(a){return a+8};
var _jquery_9=function(a){return a+9};
var _jquery_10=function(a){return a+10};
var _jquery_11=function(a){return a+11};
var _jquery_12=function(a){return a+12};
var _jquery_13=function(a){return a+13};
var _jquery_14=function(a){return a+14};
var _jquery_15=function(a){return a+15};
var _jquery_16=function(a){return a+16};
var _jquery_17=function(a){return a+17};
var _jquery_18=function(a){return a+18};
var _jquery_19=function(a){return a+19};
var _jquery_20=function(a){return a+20};
var _jquery_21=function(a){return a+21};
var _jquery_22=function(a){return a+22};
var _jquery_23=function(a){return a+23};
var _jquery_24=function(a){return a+24};
var _jquery_25=function(a){return a+25};
var _jquery_26=function(a){return a+26};
var _jquery_27=function(a){return a+27};
var _jquery_28=function(a){return a+28};
var _jquery_29=function(a){return a+29};
var _jquery_30=function(a){return a+30};
var _jquery_31=function(a){return a+31};
var _jquery_32=function(a){return a+32};
var _jquery_33=function(a){return a+33};
var _jquery_34=function(a){return a+34};
var _jquery_35=function(a){return a+35};
var _jquery_36=function(a){return a+36};
var _jquery_37=function(a){return a+37};
var _jquery_38=function(a){return a+38};
var _jquery_39=function(a){return a+39};
var _jquery_40=function(a){return a+40};
var _jquery_41=function(a){return a+41};
var _jquery_42=function(a){return a+42};
var _jquery_43=function(a){return a+43};
var _jquery_44=function(a){return a+44};
var _jquery_45=function(a){return a+45};
var _jquery_46=function(a){return a+46};
var _jquery_47=function(a){return a+47};
var _jquery_48=function(a){return a+48};
var _jquery_49=function(a){return a+49};
var _jquery_50=function(a){return a+50};
var _jquery_51=function(a){return a+51};
var _jquery_52=function(a){return a+52};
var _jquery_53=function(a){return a+53};
var _jquery_54=function(a){return a+54};
var _jquery_55=function(a){return a+55};
var _jquery_56=function(a){return a+56};
var _jquery_57=function(a){return a+57};
var _jquery_58=function(a){return a+58};
var _jquery_59=function(a){return a+59};
var _jquery_60=function(a){return a+60};
var _jquery_61=function(a){return a+61};
var _jquery_62=function(a){return a+62};
var _jquery_63=function(a){return a+63};
var _jquery_64=function(a){return a+64};
var _jquery_65=function(a){return a+65};
var _jquery_66=function(a){return a+66};
var _jquery_67=function(a){return a+67};
var _jquery_68=function(a){return a+68};
var _jquery_69=function(a){return a+69};
var _jquery_70=function(a){return a+70};
var _jquery_71=function(a){return a+71};
var _jquery_72=function(a){return a+72};
var _jquery_73=function(a){return a+73};
var _jquery_74=function(a){return a+74};
var _jquery_75=function(a){return a+75};
var _jquery_76=function(a){return a+76};
var _jquery_77=function(a){return a+77};
var _jquery_78=function(a){return a+78};
var _jquery_79=function(a){return a+79};
var _jquery_80=function(a){return a+80};
var _jquery_81=function(a){return a+81};
var _jquery_82=function(a){return a+82};
var _jquery_83=function(a){return a+83};
var _jquery_84=function(a){return a+84};
var _jquery_85=function(a){return a+85};
var _jquery_86=function(a){return a+86};
var _jquery_87=function(a){return a+87};
var _jquery_88=function(a){return a+88};
var _jquery_89=function(a){return a+89};
var _jquery_90=function(a){return a+90};
var _jquery_91=function(a){return a+91};
var _jquery_92=function(a){return a+92};
var _jquery_93=function(a){return a+93};
var _jquery_94=function(a){return a+94};
var _jquery_95=function(a){return a+95};
var _jquery_96=function(a){return a+96};
var _jquery_97=function(a){return a+97};
var _jquery_98=function(a){return a+98};
var _jquery_99=function(a){return a+99};
var _jquery_100=function(a){return a+100};
var _jquery_101=function(a){return a+101};
var _jquery_102=function(a){return a+102};
var _jquery_103=function(a){return a+103};
var _jquery_104=function(a){return a+104};
var _jquery_105=function(a){return a+105};
var _jquery_106=function(a){return a+106};
var _jquery_107=function(a){return a+107};
var _jquery_108=
